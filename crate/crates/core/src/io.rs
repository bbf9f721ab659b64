//! On-disk formats: per-identity trace CSVs with a JSON label sidecar,
//! signature dumps and distance-matrix dumps.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::eval::ScenarioSignatures;
use crate::sim::{IdentityId, IdentityTraces, ReceivedTrace, ScenarioTraces, SourceId, TagCode};

pub const LABELS_FILE: &str = "labels.json";

/// Per-trace metadata needed to cut an identity's CSV back into packets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceIndex {
    pub t_s: f64,
    pub len: usize,
    pub backscatter_start: usize,
    pub injected_powers: Vec<f64>,
    pub noise_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub identity: IdentityId,
    pub file: String,
    pub traces: Vec<TraceIndex>,
}

/// Sidecar written next to the trace CSVs of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSidecar {
    /// Ground truth: identity to true source.
    pub labels: BTreeMap<IdentityId, SourceId>,
    pub scenario_seed: u64,
    pub period_s: f64,
    pub sample_rate_hz: f64,
    pub samples_per_bit: usize,
    pub num_tags: usize,
    pub tag_code: TagCode,
    /// In simulation order.
    pub identities: Vec<IdentityEntry>,
}

fn file_stem(id: &IdentityId) -> String {
    id.0.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes `<identity>.csv` (`t_s,sample,tag_index`) per identity plus `labels.json`.
pub fn write_scenario_traces(dir: &Path, traces: &ScenarioTraces) -> Result<()> {
    fs::create_dir_all(dir)?;
    let first = traces
        .per_identity
        .iter()
        .flat_map(|it| it.traces.first())
        .next();
    let mut identities = Vec::new();
    for it in &traces.per_identity {
        let file = format!("{}.csv", file_stem(&it.identity));
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join(&file))?));
        w.write_record(["t_s", "sample", "tag_index"])?;
        for tr in &it.traces {
            for (n, (&x, &tag)) in tr.samples.iter().zip(&tr.tag_schedule).enumerate() {
                w.write_record([
                    tr.sample_time(n).to_string(),
                    x.to_string(),
                    tag.to_string(),
                ])?;
            }
        }
        w.flush()?;
        let index = it
            .traces
            .iter()
            .map(|tr| TraceIndex {
                t_s: tr.t_s,
                len: tr.samples.len(),
                backscatter_start: tr.backscatter_start,
                injected_powers: tr.injected_powers.clone(),
                noise_std: tr.noise_std,
            })
            .collect();
        identities.push(IdentityEntry {
            identity: it.identity.clone(),
            file,
            traces: index,
        });
    }
    let sidecar = TraceSidecar {
        labels: traces.labels(),
        scenario_seed: traces.seed,
        period_s: traces.period_s,
        sample_rate_hz: first.map_or(0.0, |t| t.sample_rate_hz),
        samples_per_bit: first.map_or(0, |t| t.samples_per_bit),
        num_tags: first.map_or(0, |t| t.num_tags),
        tag_code: first.map_or_else(TagCode::default_code, |t| t.tag_code.clone()),
        identities,
    };
    let mut f = BufWriter::new(File::create(dir.join(LABELS_FILE))?);
    serde_json::to_writer_pretty(&mut f, &sidecar)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

pub fn read_sidecar(dir: &Path) -> Result<TraceSidecar> {
    let f = BufReader::new(File::open(dir.join(LABELS_FILE))?);
    Ok(serde_json::from_reader(f)?)
}

/// Reads a directory written by [`write_scenario_traces`].
pub fn read_scenario_traces(dir: &Path) -> Result<ScenarioTraces> {
    let sidecar = read_sidecar(dir)?;
    let mut per_identity = Vec::with_capacity(sidecar.identities.len());
    for entry in &sidecar.identities {
        let identity = &entry.identity;
        let source = sidecar
            .labels
            .get(identity)
            .cloned()
            .ok_or_else(|| Error::UnknownIdentity(identity.to_string()))?;
        let mut rdr = csv::Reader::from_reader(BufReader::new(File::open(dir.join(&entry.file))?));
        let mut rows = rdr.records();
        let mut traces = Vec::with_capacity(entry.traces.len());
        for ix in &entry.traces {
            let mut samples = Vec::with_capacity(ix.len);
            let mut tag_schedule = Vec::with_capacity(ix.len);
            for _ in 0..ix.len {
                let row = rows
                    .next()
                    .ok_or_else(|| Error::Io(format!("{}: fewer rows than indexed", entry.file)))??;
                samples.push(parse_field::<f64>(&row, 1)?);
                tag_schedule.push(parse_field::<u16>(&row, 2)?);
            }
            traces.push(ReceivedTrace {
                identity: identity.clone(),
                t_s: ix.t_s,
                sample_rate_hz: sidecar.sample_rate_hz,
                samples,
                tag_schedule,
                tag_code: sidecar.tag_code.clone(),
                samples_per_bit: sidecar.samples_per_bit,
                num_tags: sidecar.num_tags,
                backscatter_start: ix.backscatter_start,
                injected_powers: ix.injected_powers.clone(),
                noise_std: ix.noise_std,
            });
        }
        if rows.next().is_some() {
            return Err(Error::Io(format!("{}: more rows than indexed", entry.file)));
        }
        per_identity.push(IdentityTraces {
            identity: identity.clone(),
            source,
            traces,
        });
    }
    Ok(ScenarioTraces {
        seed: sidecar.scenario_seed,
        period_s: sidecar.period_s,
        per_identity,
    })
}

fn parse_field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize) -> Result<T> {
    row.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Io(format!("bad field {i} in row {row:?}")))
}

/// Signature dump: `identity,t_s,f_1..f_K` of the normalized signatures.
pub fn write_signatures<W: Write>(w: W, sigs: &ScenarioSignatures, period_s: f64) -> Result<()> {
    let k = sigs
        .streams
        .iter()
        .flat_map(|s| s.signatures.iter().flatten())
        .map(|s| s.normalized.len())
        .next()
        .unwrap_or(0);
    let mut w = csv::Writer::from_writer(w);
    let mut header = vec!["identity".to_string(), "t_s".to_string()];
    header.extend((1..=k).map(|i| format!("f_{i}")));
    w.write_record(&header)?;
    for stream in &sigs.streams {
        for (p, sig) in stream.signatures.iter().enumerate() {
            if let Some(sig) = sig {
                let mut row = vec![stream.identity.to_string(), (p as f64 * period_s).to_string()];
                row.extend(sig.normalized.iter().map(|v| v.to_string()));
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Matrix dump: `i,j,d_1..d_L` for every off-diagonal entry present.
pub fn write_distance_matrix<W: Write>(w: W, m: &DistanceMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    let mut header = vec!["i".to_string(), "j".to_string()];
    header.extend((1..=m.profile_len).map(|l| format!("d_{l}")));
    w.write_record(&header)?;
    for (i, row) in m.entries.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if let (true, Some(dv)) = (i != j, entry) {
                let mut rec = vec![dv.from.to_string(), dv.to.to_string()];
                rec.extend(dv.values.iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
