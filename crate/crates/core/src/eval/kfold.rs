use std::collections::BTreeMap;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded k-fold partition of the dataset indices.
///
/// Whole scenarios go to one fold when there are at least `k` of them, so
/// trajectories never leak between train and test; scenarios are placed
/// greedily to balance positives and size across folds. With fewer scenarios
/// than folds the split falls back to per-sample stratification.
pub fn kfold_split(dataset: &LabeledDataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    let n = dataset.len();
    if k < 2 {
        return Err(Error::Parameter(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::Parameter(format!("k = {k} exceeds {n} samples")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, s) in dataset.samples.iter().enumerate() {
        groups.entry(s.scenario).or_default().push(i);
    }

    let mut assignment = vec![Vec::new(); k];
    if groups.len() >= k {
        let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
        groups.shuffle(&mut rng);
        // largest first so the greedy placement balances well
        groups.sort_by_key(|g| std::cmp::Reverse(g.len()));
        let mut pos = vec![0usize; k];
        for g in groups {
            let gp = g.iter().filter(|&&i| dataset.samples[i].label == 1).count();
            let target = (0..k)
                .min_by_key(|&f| (assignment[f].len(), pos[f]))
                .expect("k >= 2");
            pos[target] += gp;
            assignment[target].extend(g);
        }
    } else {
        warn!(
            "{} scenarios for {k} folds; splitting per sample, folds share scenarios",
            groups.len()
        );
        let mut next = 0usize;
        for label in [1u8, 0] {
            let mut idx: Vec<usize> = (0..n)
                .filter(|&i| dataset.samples[i].label == label)
                .collect();
            idx.shuffle(&mut rng);
            for i in idx {
                assignment[next % k].push(i);
                next += 1;
            }
        }
    }

    Ok((0..k)
        .map(|f| {
            let mut test = assignment[f].clone();
            test.sort_unstable();
            let mut train: Vec<usize> = assignment
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, v)| v.iter().copied())
                .collect();
            train.sort_unstable();
            Fold { train, test }
        })
        .collect())
}
