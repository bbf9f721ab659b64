//! Desk-scale versions of the profile-size, normalization and metric studies.

use std::path::Path;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::dataset::{
    config_hash, dataset_from_signatures, scenario_signatures, DatasetOptions, LabeledDataset,
    ScenarioSignatures,
};
use super::evaluate::{cross_validate, cross_validate_transfer, CvOutcome};
use super::metrics::MetricsReport;
use crate::detector::{TrainingConfig, DEFAULT_SIGMA};
use crate::distance::Metric;
use crate::error::{Error, Result};
use crate::signal::{SignatureView, DEFAULT_SMOOTHING_WINDOW};
use crate::sim::CorpusConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub corpus: CorpusConfig,
    pub profile_len: usize,
    pub window_stride: usize,
    pub smoothing_window: usize,
    pub k_folds: usize,
    pub sigma: f64,
    pub training: TrainingConfig,
    pub sweep_tags: Vec<usize>,
    pub sweep_lengths: Vec<usize>,
    /// Power-scale range of the scaling arm of the normalization study.
    pub scaling_range: (f64, f64),
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusConfig::default(),
            profile_len: 10,
            window_stride: 15,
            smoothing_window: DEFAULT_SMOOTHING_WINDOW,
            k_folds: 10,
            sigma: DEFAULT_SIGMA,
            training: TrainingConfig::default(),
            sweep_tags: vec![2, 3, 4],
            sweep_lengths: vec![2, 4, 6, 8, 10, 12, 14, 16],
            scaling_range: (0.25, 4.0),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn dataset_options(&self) -> DatasetOptions {
        DatasetOptions {
            profile_len: self.profile_len,
            window_stride: self.window_stride,
            view: SignatureView::Normalized,
            metric: Metric::AdjustedCosine,
        }
    }
}

/// Signature streams of a generated corpus plus its configuration digest.
pub struct CorpusSignatures {
    pub scenarios: Vec<ScenarioSignatures>,
    pub config_hash: String,
}

pub fn extract_corpus(corpus: &CorpusConfig, seed: u64, smoothing_window: usize) -> Result<CorpusSignatures> {
    let configs = corpus.generate(seed)?;
    let scenarios = configs
        .iter()
        .map(|c| scenario_signatures(c, smoothing_window))
        .collect::<Result<Vec<_>>>()?;
    let dropped: usize = scenarios
        .iter()
        .flat_map(|s| &s.streams)
        .map(|st| st.signatures.iter().filter(|s| s.is_none()).count())
        .sum();
    if dropped > 0 {
        info!("{dropped} traces failed segmentation or extraction");
    }
    Ok(CorpusSignatures {
        scenarios,
        config_hash: config_hash(&configs),
    })
}

impl CorpusSignatures {
    pub fn dataset(&self, opts: &DatasetOptions) -> Result<LabeledDataset> {
        dataset_from_signatures(&self.scenarios, opts, self.config_hash.clone())
    }

    pub fn cross_validate(&self, opts: &DatasetOptions, cfg: &ExperimentConfig, cv_seed: u64) -> Result<CvOutcome> {
        let ds = self.dataset(opts)?;
        cross_validate(&ds, cfg.k_folds, cv_seed, cfg.sigma, &cfg.training)
    }
}

/// Overall detection performance with the configured profile size.
pub fn overall(cfg: &ExperimentConfig, seed: u64) -> Result<(LabeledDataset, CvOutcome)> {
    let corpus = extract_corpus(&cfg.corpus, seed, cfg.smoothing_window)?;
    let ds = corpus.dataset(&cfg.dataset_options())?;
    let cv = cross_validate(&ds, cfg.k_folds, seed, cfg.sigma, &cfg.training)?;
    Ok((ds, cv))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub num_tags: usize,
    pub profile_len: usize,
    /// `None` when the cell could not be evaluated.
    pub auroc: Option<f64>,
}

/// Cross-validated AUROC for every (tag count, profile length) pair.
pub fn sweep_profile_size(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<SweepCell>> {
    let mut cells = Vec::new();
    for &k in &cfg.sweep_tags {
        let corpus_cfg = CorpusConfig {
            num_tags: k,
            ..cfg.corpus.clone()
        };
        let corpus = extract_corpus(&corpus_cfg, seed, cfg.smoothing_window)?;
        for &l in &cfg.sweep_lengths {
            let opts = DatasetOptions {
                profile_len: l,
                ..cfg.dataset_options()
            };
            let auroc = match corpus.cross_validate(&opts, cfg, seed) {
                Ok(cv) => Some(cv.report.auroc),
                Err(e) => {
                    warn!("sweep cell K={k} L={l} failed: {e}");
                    None
                }
            };
            cells.push(SweepCell {
                num_tags: k,
                profile_len: l,
                auroc,
            });
        }
    }
    Ok(cells)
}

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("K,L,auroc\n");
    for c in cells {
        let a = c.auroc.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", c.num_tags, c.profile_len, a));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub power_scaling: bool,
    pub normalized: bool,
    pub report: MetricsReport,
}

/// Normalized versus raw signatures, with and without per-identity power scaling.
///
/// The detector is always fitted on ordinary traffic; the scaling arm tests it
/// on held-out scenarios whose attackers scale their power per identity. Both
/// arms share seeds and trajectories; only the attackers' power scales differ.
pub fn ablation_normalization(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<AblationRow>> {
    let plain = extract_corpus(
        &CorpusConfig {
            power_scaling: None,
            ..cfg.corpus.clone()
        },
        seed,
        cfg.smoothing_window,
    )?;
    let scaled = extract_corpus(
        &CorpusConfig {
            power_scaling: Some(cfg.scaling_range),
            ..cfg.corpus.clone()
        },
        seed,
        cfg.smoothing_window,
    )?;
    let mut rows = Vec::new();
    for (scaling, corpus) in [(true, &scaled), (false, &plain)] {
        for view in [SignatureView::Normalized, SignatureView::Raw] {
            let opts = DatasetOptions {
                view,
                ..cfg.dataset_options()
            };
            let train = plain.dataset(&opts)?;
            let test = corpus.dataset(&opts)?;
            let cv = cross_validate_transfer(&train, &test, cfg.k_folds, seed, cfg.sigma, &cfg.training)?;
            rows.push(AblationRow {
                power_scaling: scaling,
                normalized: view == SignatureView::Normalized,
                report: cv.report,
            });
        }
    }
    Ok(rows)
}

pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("power_scaling,normalized,tpr,fpr,accuracy,auroc\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.power_scaling, r.normalized, r.report.tpr, r.report.fpr, r.report.accuracy, r.report.auroc
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: Metric,
    pub report: MetricsReport,
}

/// Same corpus and folds, one run per row metric.
pub fn compare_distance_metrics(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<MetricRow>> {
    let corpus = extract_corpus(&cfg.corpus, seed, cfg.smoothing_window)?;
    Metric::ALL
        .into_iter()
        .map(|metric| {
            let opts = DatasetOptions {
                metric,
                ..cfg.dataset_options()
            };
            let cv = corpus.cross_validate(&opts, cfg, seed)?;
            Ok(MetricRow {
                metric,
                report: cv.report,
            })
        })
        .collect()
}

pub fn metrics_csv(rows: &[MetricRow]) -> String {
    let mut out = String::from("metric,tpr,fpr\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.metric, r.report.tpr, r.report.fpr));
    }
    out
}
