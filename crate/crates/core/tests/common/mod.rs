#![allow(dead_code)]

use backscatter_sybil::eval::ExperimentConfig;
use backscatter_sybil::sim::{CorpusConfig, NoiseModel};

/// A few short scenarios so whole experiments run in seconds.
pub fn tiny_config() -> ExperimentConfig {
    ExperimentConfig {
        corpus: CorpusConfig {
            scenarios: 4,
            horizon_s: 24.0,
            ..CorpusConfig::default()
        },
        k_folds: 4,
        sweep_tags: vec![2, 4],
        sweep_lengths: vec![2, 4],
        ..ExperimentConfig::default()
    }
}

pub fn noise_free(mut corpus: CorpusConfig) -> CorpusConfig {
    corpus.noise = NoiseModel::None;
    corpus
}
