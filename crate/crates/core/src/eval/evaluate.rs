use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use super::kfold::kfold_split;
use super::metrics::{MetricsReport, RobotRecord};
use crate::detector::{
    detect_sybil, predict_similarity, train_mwle, weighted_samples, LrModel, SimilarityMatrix,
    TrainingConfig, Verdict,
};
use crate::error::{Error, Result};
use crate::sim::IdentityId;

/// Pair verdict for one (scenario, window) group of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowVerdict {
    pub scenario: u64,
    pub window: usize,
    pub verdict: Verdict,
}

/// Judges every (scenario, window) group in `test`.
///
/// Each group yields a similarity matrix over its identities; ordered pairs
/// missing from the data score 0. Returns the verdicts with one robot record
/// per identity of each group.
pub fn judge_windows(
    model: &LrModel,
    test: &LabeledDataset,
    sigma: f64,
) -> Result<(Vec<WindowVerdict>, Vec<RobotRecord>)> {
    let fakes = test.fake_identities();
    let mut groups: BTreeMap<(u64, usize), Vec<usize>> = BTreeMap::new();
    for (i, s) in test.samples.iter().enumerate() {
        groups.entry((s.scenario, s.window)).or_default().push(i);
    }
    let mut verdicts = Vec::with_capacity(groups.len());
    let mut records = Vec::new();
    for ((scenario, window), members) in groups {
        let ids: BTreeSet<&IdentityId> = members
            .iter()
            .flat_map(|&i| [&test.samples[i].from, &test.samples[i].to])
            .collect();
        let identities: Vec<IdentityId> = ids.into_iter().cloned().collect();
        let index: BTreeMap<&IdentityId, usize> =
            identities.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let n = identities.len();
        let mut probs = vec![vec![0.0; n]; n];
        for &i in &members {
            let s = &test.samples[i];
            probs[index[&s.from]][index[&s.to]] = predict_similarity(model, &s.distance)?;
        }
        let sm = SimilarityMatrix {
            identities: identities.clone(),
            probs,
        };
        let verdict = detect_sybil(&sm, sigma)?;
        for (id, score) in identities.iter().zip(sm.identity_scores()) {
            records.push(RobotRecord {
                is_fake: fakes.contains(&(scenario, id.clone())),
                score,
                flagged: verdict.is_fake(id),
            });
        }
        verdicts.push(WindowVerdict {
            scenario,
            window,
            verdict,
        });
    }
    Ok((verdicts, records))
}

pub fn robot_records(model: &LrModel, test: &LabeledDataset, sigma: f64) -> Result<Vec<RobotRecord>> {
    Ok(judge_windows(model, test, sigma)?.1)
}

/// Robot-level TPR, FPR, accuracy and ROC of `model` on `test`.
pub fn evaluate(model: &LrModel, test: &LabeledDataset, sigma: f64) -> Result<MetricsReport> {
    if test.is_empty() {
        return Err(Error::MetricsUndefined("empty test set".into()));
    }
    MetricsReport::from_records(&robot_records(model, test, sigma)?)
}

/// Class-balanced maximum weighted likelihood fit on a whole dataset.
pub fn train_on(dataset: &LabeledDataset, config: &TrainingConfig) -> Result<LrModel> {
    let data: Vec<(Vec<f64>, u8)> = dataset
        .samples
        .iter()
        .map(|s| (s.distance.clone(), s.label))
        .collect();
    train_mwle(&weighted_samples(&data)?, config)
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    /// Metrics over the pooled held-out predictions of all folds.
    pub report: MetricsReport,
    pub fold_models: Vec<LrModel>,
    /// Held-out robot records of all folds, in fold order.
    pub records: Vec<RobotRecord>,
}

pub fn cross_validate(
    dataset: &LabeledDataset,
    k: usize,
    seed: u64,
    sigma: f64,
    config: &TrainingConfig,
) -> Result<CvOutcome> {
    let folds = kfold_split(dataset, k, seed)?;
    let mut records = Vec::new();
    let mut fold_models = Vec::with_capacity(k);
    for fold in &folds {
        let model = train_on(&dataset.subset(&fold.train), config)?;
        records.extend(robot_records(&model, &dataset.subset(&fold.test), sigma)?);
        fold_models.push(model);
    }
    Ok(CvOutcome {
        report: MetricsReport::from_records(&records)?,
        fold_models,
        records,
    })
}

/// Cross-validation where each fold trains on `train_set` and tests on the
/// samples of `test_set` from the fold's held-out scenarios.
///
/// Used to confront a detector fitted on ordinary traffic with a corpus in
/// which attackers change behaviour; both datasets must come from the same
/// scenario seeds.
pub fn cross_validate_transfer(
    train_set: &LabeledDataset,
    test_set: &LabeledDataset,
    k: usize,
    seed: u64,
    sigma: f64,
    config: &TrainingConfig,
) -> Result<CvOutcome> {
    let folds = kfold_split(train_set, k, seed)?;
    let mut records = Vec::new();
    let mut fold_models = Vec::with_capacity(k);
    for fold in &folds {
        let model = train_on(&train_set.subset(&fold.train), config)?;
        let held_out: BTreeSet<u64> = fold.test.iter().map(|&i| train_set.samples[i].scenario).collect();
        let test: Vec<usize> = (0..test_set.len())
            .filter(|&i| held_out.contains(&test_set.samples[i].scenario))
            .collect();
        if !test.is_empty() {
            records.extend(robot_records(&model, &test_set.subset(&test), sigma)?);
        }
        fold_models.push(model);
    }
    Ok(CvOutcome {
        report: MetricsReport::from_records(&records)?,
        fold_models,
        records,
    })
}
