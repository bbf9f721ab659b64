//! Labeled distance-vector datasets built from simulated scenarios.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distance::{distance_matrix_with, Metric};
use crate::error::{Error, Result};
use crate::signal::{build_profile, process_trace, MultipathSignature, SignatureView};
use crate::sim::{simulate_scenario, IdentityId, ScenarioConfig, ScenarioTraces, SourceId};

/// Signature stream of one identity; `None` where the trace was unusable.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityStream {
    pub identity: IdentityId,
    pub source: SourceId,
    pub signatures: Vec<Option<MultipathSignature>>,
}

/// All signature streams of one simulated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSignatures {
    pub seed: u64,
    pub streams: Vec<IdentityStream>,
}

impl ScenarioSignatures {
    pub fn from_traces(traces: &ScenarioTraces, smoothing_window: usize) -> Self {
        let streams = traces
            .per_identity
            .iter()
            .map(|it| IdentityStream {
                identity: it.identity.clone(),
                source: it.source.clone(),
                signatures: it
                    .traces
                    .iter()
                    .map(|t| process_trace(t, smoothing_window).ok())
                    .collect(),
            })
            .collect();
        Self {
            seed: traces.seed,
            streams,
        }
    }

    pub fn periods(&self) -> usize {
        self.streams.iter().map(|s| s.signatures.len()).max().unwrap_or(0)
    }
}

/// Simulates a scenario with its own seed and extracts every signature.
pub fn scenario_signatures(cfg: &ScenarioConfig, smoothing_window: usize) -> Result<ScenarioSignatures> {
    let traces = simulate_scenario(cfg, cfg.seed)?;
    Ok(ScenarioSignatures::from_traces(&traces, smoothing_window))
}

/// How distance vectors are formed from signature streams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetOptions {
    pub profile_len: usize,
    /// Periods between consecutive profile windows.
    pub window_stride: usize,
    pub view: SignatureView,
    pub metric: Metric,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            profile_len: 10,
            window_stride: 15,
            view: SignatureView::Normalized,
            metric: Metric::AdjustedCosine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSample {
    pub scenario: u64,
    /// Last update period covered by the profiles.
    pub window: usize,
    pub from: IdentityId,
    pub to: IdentityId,
    pub from_source: SourceId,
    pub to_source: SourceId,
    pub label: u8,
    pub distance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledDataset {
    pub profile_len: usize,
    pub samples: Vec<DatasetSample>,
    pub scenario_seeds: Vec<u64>,
    /// Digest of the configurations the data came from.
    pub config_hash: String,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.samples.iter().filter(|s| s.label == 1).count()
    }

    pub fn positive_fraction(&self) -> f64 {
        self.positives() as f64 / self.len().max(1) as f64
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        let samples: Vec<DatasetSample> =
            indices.iter().map(|&i| self.samples[i].clone()).collect();
        let seeds: BTreeSet<u64> = samples.iter().map(|s| s.scenario).collect();
        LabeledDataset {
            profile_len: self.profile_len,
            samples,
            scenario_seeds: seeds.into_iter().collect(),
            config_hash: self.config_hash.clone(),
        }
    }

    /// Identities whose transmitter claims more than one identity, per scenario.
    pub fn fake_identities(&self) -> BTreeSet<(u64, IdentityId)> {
        let mut by_source: BTreeMap<(u64, &SourceId), BTreeSet<&IdentityId>> = BTreeMap::new();
        for s in &self.samples {
            by_source.entry((s.scenario, &s.from_source)).or_default().insert(&s.from);
            by_source.entry((s.scenario, &s.to_source)).or_default().insert(&s.to);
        }
        by_source
            .into_iter()
            .filter(|(_, ids)| ids.len() > 1)
            .flat_map(|((seed, _), ids)| ids.into_iter().map(move |id| (seed, id.clone())))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec![
            "scenario".to_string(),
            "window".into(),
            "from".into(),
            "to".into(),
            "from_source".into(),
            "to_source".into(),
            "label".into(),
        ];
        header.extend((1..=self.profile_len).map(|l| format!("d_{l}")));
        wr.write_record(&header)?;
        for s in &self.samples {
            let mut rec = vec![
                s.scenario.to_string(),
                s.window.to_string(),
                s.from.0.clone(),
                s.to.0.clone(),
                s.from_source.0.clone(),
                s.to_source.0.clone(),
                s.label.to_string(),
            ];
            rec.extend(s.distance.iter().map(|d| d.to_string()));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.clone();
        let profile_len = header.iter().filter(|h| h.starts_with("d_")).count();
        if header.len() != 7 + profile_len || profile_len == 0 {
            return Err(Error::Io("unexpected dataset header".into()));
        }
        let parse_err = |what: &str, v: &str| Error::Io(format!("bad {what} value {v:?}"));
        let mut samples = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i].parse::<f64>().map_err(|_| parse_err("distance", &rec[i]))
            };
            let distance = (7..7 + profile_len).map(num).collect::<Result<Vec<_>>>()?;
            samples.push(DatasetSample {
                scenario: rec[0].parse().map_err(|_| parse_err("scenario", &rec[0]))?,
                window: rec[1].parse().map_err(|_| parse_err("window", &rec[1]))?,
                from: IdentityId(rec[2].to_string()),
                to: IdentityId(rec[3].to_string()),
                from_source: SourceId(rec[4].to_string()),
                to_source: SourceId(rec[5].to_string()),
                label: rec[6].parse().map_err(|_| parse_err("label", &rec[6]))?,
                distance,
            });
        }
        let seeds: BTreeSet<u64> = samples.iter().map(|s| s.scenario).collect();
        Ok(LabeledDataset {
            profile_len,
            samples,
            scenario_seeds: seeds.into_iter().collect(),
            config_hash: String::new(),
        })
    }

    /// SHA-256 of the CSV serialization.
    pub fn content_hash(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        hex(&Sha256::digest(&buf))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn config_hash(configs: &[ScenarioConfig]) -> String {
    let mut h = Sha256::new();
    for c in configs {
        h.update(serde_json::to_vec(c).expect("scenario configs serialize"));
    }
    hex(&h.finalize())
}

/// Distance samples of one scenario: every ordered identity pair with
/// profiles in each window.
pub fn scenario_samples(sigs: &ScenarioSignatures, opts: &DatasetOptions) -> Result<Vec<DatasetSample>> {
    let l = opts.profile_len;
    if l == 0 || opts.window_stride == 0 {
        return Err(Error::Parameter("profile length and stride must be positive".into()));
    }
    let mut out = Vec::new();
    let periods = sigs.periods();
    let mut end = l - 1;
    while end < periods {
        let first = (end + 1).saturating_sub(2 * l);
        let mut profiles = Vec::new();
        let mut sources = Vec::new();
        for stream in &sigs.streams {
            let valid: Vec<MultipathSignature> = stream.signatures[first..=end]
                .iter()
                .flatten()
                .cloned()
                .collect();
            if let Ok(p) = build_profile(&stream.identity, &valid, l, opts.view) {
                profiles.push(p);
                sources.push(stream.source.clone());
            }
        }
        if profiles.len() >= 2 {
            let dm = distance_matrix_with(&profiles, opts.metric)?;
            for (i, j, dv) in dm.off_diagonal() {
                out.push(DatasetSample {
                    scenario: sigs.seed,
                    window: end,
                    from: dv.from.clone(),
                    to: dv.to.clone(),
                    from_source: sources[i].clone(),
                    to_source: sources[j].clone(),
                    label: u8::from(sources[i] == sources[j]),
                    distance: dv.values.clone(),
                });
            }
        }
        end += opts.window_stride;
    }
    Ok(out)
}

/// Builds a dataset from precomputed signature streams.
pub fn dataset_from_signatures(
    corpus: &[ScenarioSignatures],
    opts: &DatasetOptions,
    config_hash: String,
) -> Result<LabeledDataset> {
    let mut samples = Vec::new();
    for sigs in corpus {
        let s = scenario_samples(sigs, opts)?;
        if s.is_empty() {
            warn!("scenario {} produced no usable profiles; skipped", sigs.seed);
        }
        samples.extend(s);
    }
    Ok(LabeledDataset {
        profile_len: opts.profile_len,
        samples,
        scenario_seeds: corpus.iter().map(|c| c.seed).collect(),
        config_hash,
    })
}

/// Simulates each scenario and turns it into labeled distance vectors.
pub fn generate_dataset(
    configs: &[ScenarioConfig],
    smoothing_window: usize,
    opts: &DatasetOptions,
) -> Result<LabeledDataset> {
    let has_attacker = configs
        .iter()
        .any(|c| c.agents.iter().any(|a| a.is_attacker()) && c.agents.iter().any(|a| !a.is_attacker()));
    if !has_attacker {
        return Err(Error::Config(
            "need a scenario with at least one attacker and one legitimate robot".into(),
        ));
    }
    let corpus = configs
        .iter()
        .map(|c| scenario_signatures(c, smoothing_window))
        .collect::<Result<Vec<_>>>()?;
    dataset_from_signatures(&corpus, opts, config_hash(configs))
}
