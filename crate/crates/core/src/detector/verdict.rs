use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::logistic::{predict_similarity, LrModel};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::sim::IdentityId;

/// Default decision threshold on both directed similarities.
pub const DEFAULT_SIGMA: f64 = 0.5;

/// Directed similarity probabilities; `probs[i][j]` scores `d_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub identities: Vec<IdentityId>,
    pub probs: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    /// Both directions must agree, so a pair scores the weaker of the two.
    pub fn pair_score(&self, i: usize, j: usize) -> f64 {
        self.probs[i][j].min(self.probs[j][i])
    }

    /// Per identity, its strongest pair score: the identity is flagged at
    /// threshold `sigma` exactly when this score is at least `sigma`.
    pub fn identity_scores(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| self.pair_score(i, j))
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

pub fn similarity_matrix(model: &LrModel, d: &DistanceMatrix) -> Result<SimilarityMatrix> {
    if d.profile_len != model.weights.len() {
        return Err(Error::Shape(format!(
            "model with L = {} on distance vectors of length {}",
            model.weights.len(),
            d.profile_len
        )));
    }
    let n = d.len();
    let mut probs = vec![vec![0.0; n]; n];
    for (i, j, dv) in d.off_diagonal() {
        probs[i][j] = predict_similarity(model, &dv.values)?;
    }
    Ok(SimilarityMatrix {
        identities: d.identities.clone(),
        probs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Flagged pairs, each stored with the smaller identity first.
    pub sybil_pairs: BTreeSet<(IdentityId, IdentityId)>,
    pub fake_identities: BTreeSet<IdentityId>,
    pub legit_identities: BTreeSet<IdentityId>,
    pub threshold: f64,
}

impl Verdict {
    pub fn is_fake(&self, id: &IdentityId) -> bool {
        self.fake_identities.contains(id)
    }
}

/// Flags `(i, j)` when both `s_ij` and `s_ji` reach `sigma`; every identity
/// in a flagged pair is fake, the rest are legitimate.
pub fn detect_sybil(s: &SimilarityMatrix, sigma: f64) -> Result<Verdict> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Parameter(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    let n = s.len();
    let mut sybil_pairs = BTreeSet::new();
    let mut fake = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if s.probs[i][j] >= sigma && s.probs[j][i] >= sigma {
                let (a, b) = (&s.identities[i], &s.identities[j]);
                let pair = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                sybil_pairs.insert(pair);
                fake.insert(a.clone());
                fake.insert(b.clone());
            }
        }
    }
    let legit = s
        .identities
        .iter()
        .filter(|id| !fake.contains(*id))
        .cloned()
        .collect();
    Ok(Verdict {
        sybil_pairs,
        fake_identities: fake,
        legit_identities: legit,
        threshold: sigma,
    })
}
