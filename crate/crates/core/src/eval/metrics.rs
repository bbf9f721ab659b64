//! Robot-level detection metrics, ROC curve and AUROC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of evenly spaced thresholds on [0, 1] for the ROC sweep.
pub const ROC_THRESHOLDS: usize = 201;

/// One robot identity judged in one profile window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotRecord {
    pub is_fake: bool,
    /// Strongest two-sided pair similarity of the identity.
    pub score: f64,
    /// Verdict at the operating threshold.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tpr: f64,
    pub fpr: f64,
    pub accuracy: f64,
    pub auroc: f64,
    pub n_fake: usize,
    pub n_legit: usize,
    #[serde(skip)]
    pub roc_points: Vec<(f64, f64)>,
}

impl MetricsReport {
    pub fn from_records(records: &[RobotRecord]) -> Result<Self> {
        let n_fake = records.iter().filter(|r| r.is_fake).count();
        let n_legit = records.len() - n_fake;
        if n_fake == 0 || n_legit == 0 {
            return Err(Error::MetricsUndefined(format!(
                "{n_fake} fake and {n_legit} legitimate robots"
            )));
        }
        let tp = records.iter().filter(|r| r.is_fake && r.flagged).count();
        let fp = records.iter().filter(|r| !r.is_fake && r.flagged).count();
        let tn = n_legit - fp;
        let roc_points = roc_curve(records);
        Ok(Self {
            tpr: tp as f64 / n_fake as f64,
            fpr: fp as f64 / n_legit as f64,
            accuracy: (tp + tn) as f64 / records.len() as f64,
            auroc: trapezoid_area(&roc_points),
            n_fake,
            n_legit,
            roc_points,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn roc_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for (f, t) in &self.roc_points {
            out.push_str(&format!("{f},{t}\n"));
        }
        out
    }
}

/// ROC points from thresholds `1, 0.995, ..., 0`, prefixed with the origin.
/// A robot counts as flagged at threshold `t` when its score is at least `t`.
pub fn roc_curve(records: &[RobotRecord]) -> Vec<(f64, f64)> {
    let n_fake = records.iter().filter(|r| r.is_fake).count().max(1) as f64;
    let n_legit = records.iter().filter(|r| !r.is_fake).count().max(1) as f64;
    let mut points = Vec::with_capacity(ROC_THRESHOLDS + 1);
    points.push((0.0, 0.0));
    for step in (0..ROC_THRESHOLDS).rev() {
        let t = step as f64 / (ROC_THRESHOLDS - 1) as f64;
        let tp = records.iter().filter(|r| r.is_fake && r.score >= t).count() as f64;
        let fp = records.iter().filter(|r| !r.is_fake && r.score >= t).count() as f64;
        points.push((fp / n_legit, tp / n_fake));
    }
    points
}

/// Area under a polyline given in order of nondecreasing x.
pub fn trapezoid_area(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

/// Probability that a random positive outscores a random negative, ties counting half.
pub fn mann_whitney_auc(positives: &[f64], negatives: &[f64]) -> f64 {
    let mut neg = negatives.to_vec();
    neg.sort_by(f64::total_cmp);
    let mut wins = 0.0;
    for &p in positives {
        let below = neg.partition_point(|&n| n < p);
        let not_above = neg.partition_point(|&n| n <= p);
        wins += below as f64 + 0.5 * (not_above - below) as f64;
    }
    wins / (positives.len() as f64 * negatives.len() as f64)
}
