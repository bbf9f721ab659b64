use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::signature::{l2_norm, MultipathSignature};
use crate::error::{Error, Result};
use crate::sim::IdentityId;

/// Which signature vector a profile is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SignatureView {
    #[default]
    Normalized,
    /// Unnormalized powers, used only to measure what normalization buys.
    Raw,
}

impl SignatureView {
    fn pick(self, sig: &MultipathSignature) -> &[f64] {
        match self {
            SignatureView::Normalized => &sig.normalized,
            SignatureView::Raw => &sig.raw,
        }
    }
}

/// `L` successive signatures of one identity (rows) and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalProfile {
    pub identity: IdentityId,
    pub rows: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
}

impl SignalProfile {
    pub fn from_rows(identity: IdentityId, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Shape("profile needs at least one row".into()))?;
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::Shape("profile rows must share a nonzero length".into()));
        }
        let mut mean = vec![0.0; k];
        for r in &rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        let l = rows.len() as f64;
        mean.iter_mut().for_each(|m| *m /= l);
        Ok(Self {
            identity,
            rows,
            mean,
        })
    }

    /// Profile length `L`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Signature dimension `K`.
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Rows are unit-norm and nonnegative.
    pub fn is_normalized(&self) -> bool {
        self.rows
            .iter()
            .all(|r| (l2_norm(r) - 1.0).abs() <= 1e-9 && r.iter().all(|&v| v >= 0.0))
    }
}

/// Profile from the `l` most recent signatures of `signatures` (oldest first).
pub fn build_profile(
    identity: &IdentityId,
    signatures: &[MultipathSignature],
    l: usize,
    view: SignatureView,
) -> Result<SignalProfile> {
    if l == 0 {
        return Err(Error::Parameter("profile length must be at least 1".into()));
    }
    if signatures.len() < l {
        return Err(Error::InsufficientData {
            identity: identity.0.clone(),
            have: signatures.len(),
            need: l,
        });
    }
    let rows = signatures[signatures.len() - l..]
        .iter()
        .map(|s| view.pick(s).to_vec())
        .collect();
    SignalProfile::from_rows(identity.clone(), rows)
}

/// Sliding window over one identity's signature stream.
///
/// Each update period pushes either a signature or a miss. A profile is
/// available once `l` valid signatures fall inside the last `2l` periods;
/// older entries are evicted as new periods arrive.
#[derive(Debug, Clone)]
pub struct ProfileBuilder {
    identity: IdentityId,
    l: usize,
    view: SignatureView,
    period: usize,
    window: VecDeque<(usize, MultipathSignature)>,
}

impl ProfileBuilder {
    pub fn new(identity: IdentityId, l: usize, view: SignatureView) -> Self {
        Self {
            identity,
            l,
            view,
            period: 0,
            window: VecDeque::with_capacity(l + 1),
        }
    }

    /// Records the outcome of the next update period.
    pub fn push(&mut self, signature: Option<MultipathSignature>) {
        if let Some(sig) = signature {
            self.window.push_back((self.period, sig));
            if self.window.len() > self.l {
                self.window.pop_front();
            }
        }
        self.period += 1;
        let horizon = 2 * self.l;
        while let Some((p, _)) = self.window.front() {
            if self.period - p > horizon {
                self.window.pop_front();
            } else {
                break;
            }
        }
    }

    pub fn profile(&self) -> Result<SignalProfile> {
        if self.window.len() < self.l {
            return Err(Error::InsufficientData {
                identity: self.identity.0.clone(),
                have: self.window.len(),
                need: self.l,
            });
        }
        let rows = self
            .window
            .iter()
            .map(|(_, s)| self.view.pick(s).to_vec())
            .collect();
        SignalProfile::from_rows(self.identity.clone(), rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> MultipathSignature {
        MultipathSignature::from_raw(v.to_vec()).unwrap()
    }

    #[test]
    fn ten_rows_in_order() {
        let sigs: Vec<_> = (1..=10).map(|i| sig(&[i as f64, 1.0])).collect();
        let p = build_profile(&"a".into(), &sigs, 10, SignatureView::Normalized).unwrap();
        assert_eq!(p.len(), 10);
        for (row, s) in p.rows.iter().zip(&sigs) {
            assert_eq!(row, &s.normalized);
        }
        assert!(p.is_normalized());
    }

    #[test]
    fn identical_rows_mean() {
        let sigs = vec![sig(&[1.0, 2.0, 2.0]); 5];
        let p = build_profile(&"a".into(), &sigs, 5, SignatureView::Normalized).unwrap();
        for (m, v) in p.mean.iter().zip(&sigs[0].normalized) {
            assert!((m - v).abs() < 1e-15);
        }
    }

    #[test]
    fn single_row_profile() {
        let sigs = vec![sig(&[3.0, 4.0]), sig(&[1.0, 0.0])];
        let p = build_profile(&"a".into(), &sigs, 1, SignatureView::Normalized).unwrap();
        assert_eq!(p.rows, vec![vec![1.0, 0.0]]);
        assert_eq!(p.mean, vec![1.0, 0.0]);
    }

    #[test]
    fn too_few_signatures() {
        let sigs = vec![sig(&[1.0, 1.0]); 3];
        assert!(matches!(
            build_profile(&"a".into(), &sigs, 4, SignatureView::Normalized),
            Err(Error::InsufficientData { have: 3, need: 4, .. })
        ));
    }

    #[test]
    fn raw_view_keeps_powers() {
        let sigs = vec![sig(&[3.0, 4.0]); 2];
        let p = build_profile(&"a".into(), &sigs, 2, SignatureView::Raw).unwrap();
        assert_eq!(p.rows[0], vec![3.0, 4.0]);
        assert!(!p.is_normalized());
    }

    #[test]
    fn sliding_window_evicts_oldest() {
        let mut b = ProfileBuilder::new("a".into(), 3, SignatureView::Raw);
        for i in 1..=5 {
            b.push(Some(sig(&[i as f64, 1.0])));
        }
        let p = b.profile().unwrap();
        let firsts: Vec<f64> = p.rows.iter().map(|r| r[0]).collect();
        assert_eq!(firsts, vec![3.0, 4.0, 5.0]);
    }

    #[test]
    fn misses_within_horizon_are_tolerated_then_reset() {
        let mut b = ProfileBuilder::new("a".into(), 3, SignatureView::Raw);
        b.push(Some(sig(&[1.0, 1.0])));
        b.push(None);
        b.push(Some(sig(&[2.0, 1.0])));
        b.push(None);
        b.push(Some(sig(&[3.0, 1.0])));
        assert!(b.profile().is_ok());
        // two more misses push the first signature beyond 2L = 6 periods
        b.push(None);
        b.push(None);
        assert!(matches!(b.profile(), Err(Error::InsufficientData { .. })));
    }
}
