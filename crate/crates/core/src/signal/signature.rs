use serde::{Deserialize, Serialize};

use super::segment::SegmentBounds;
use crate::error::{Error, Result};
use crate::sim::ReceivedTrace;

/// Per-tag reflected powers of one packet, raw and L2-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipathSignature {
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl MultipathSignature {
    /// Normalizes `raw` to unit length; an all-zero vector has no direction.
    pub fn from_raw(raw: Vec<f64>) -> Result<Self> {
        let norm = l2_norm(&raw);
        if !(norm > 0.0) {
            return Err(Error::DegenerateSignature);
        }
        let normalized = raw.iter().map(|p| p / norm).collect();
        Ok(Self { raw, normalized })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Mean of reflected samples minus mean of non-reflected samples, floored at zero.
pub fn extract_reflection(block: &[f64], reflect_mask: &[bool]) -> Result<f64> {
    if block.len() != reflect_mask.len() {
        return Err(Error::Shape(format!(
            "block of {} samples with mask of {}",
            block.len(),
            reflect_mask.len()
        )));
    }
    let (mut on_sum, mut on_n, mut off_sum, mut off_n) = (0.0, 0usize, 0.0, 0usize);
    for (&s, &on) in block.iter().zip(reflect_mask) {
        if on {
            on_sum += s;
            on_n += 1;
        } else {
            off_sum += s;
            off_n += 1;
        }
    }
    if on_n == 0 || off_n == 0 {
        return Err(Error::Mask {
            reflected: on_n,
            non_reflected: off_n,
        });
    }
    Ok((on_sum / on_n as f64 - off_sum / off_n as f64).max(0.0))
}

/// Extracts every tag's reflection from a segmented trace.
pub fn build_signature(trace: &ReceivedTrace, bounds: &SegmentBounds) -> Result<MultipathSignature> {
    if bounds.t_end > trace.samples.len() || bounds.block_len != trace.block_len() {
        return Err(Error::Shape(format!(
            "bounds {}..{} do not fit a trace of {} samples",
            bounds.t_start,
            bounds.t_end,
            trace.samples.len()
        )));
    }
    let mask = trace.block_mask();
    let raw = (0..bounds.num_blocks())
        .map(|k| extract_reflection(&trace.samples[bounds.block(k)], &mask))
        .collect::<Result<Vec<f64>>>()?;
    MultipathSignature::from_raw(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::segment::{segment_backscatter, DEFAULT_SMOOTHING_WINDOW};
    use crate::sim::NoiseModel;
    use crate::testutil::{line_scenario, synthesize};

    #[test]
    fn constant_halves() {
        let block = [5.0, 5.0, 2.0, 2.0, 5.0, 2.0];
        let mask = [true, true, false, false, true, false];
        assert_eq!(extract_reflection(&block, &mask).unwrap(), 3.0);
    }

    #[test]
    fn equal_halves_clamp_to_zero() {
        let block = [1.0, 2.0, 1.0, 2.0, 1.0, 2.001];
        let mask = [true, true, true, false, false, false];
        assert_eq!(extract_reflection(&block, &mask).unwrap(), 0.0);
    }

    #[test]
    fn one_sided_mask_is_an_error() {
        assert!(matches!(
            extract_reflection(&[1.0, 2.0], &[true, true]),
            Err(Error::Mask { .. })
        ));
    }

    #[test]
    fn three_four_five() {
        let s = MultipathSignature::from_raw(vec![3e-9, 4e-9]).unwrap();
        assert!((s.normalized[0] - 0.6).abs() < 1e-12);
        assert!((s.normalized[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn equal_powers_normalize_to_half() {
        let s = MultipathSignature::from_raw(vec![2e-8; 4]).unwrap();
        for f in s.normalized {
            assert!((f - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_signature_is_degenerate() {
        assert_eq!(
            MultipathSignature::from_raw(vec![0.0; 3]),
            Err(Error::DegenerateSignature)
        );
    }

    #[test]
    fn scale_invariance() {
        let base = MultipathSignature::from_raw(vec![1.0, 2.5, 0.3, 4.0]).unwrap();
        for alpha in [0.25, 0.9, 3.7, 1e6] {
            let s = MultipathSignature::from_raw(base.raw.iter().map(|p| p * alpha).collect())
                .unwrap();
            for (a, b) in s.normalized.iter().zip(&base.normalized) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn noise_free_extraction_recovers_injected_powers() {
        let sc = line_scenario(NoiseModel::None);
        let tr = synthesize(&sc, "alice", 3.0, 0);
        let b = segment_backscatter(&tr, DEFAULT_SMOOTHING_WINDOW).unwrap();
        let sig = build_signature(&tr, &b).unwrap();
        for (got, want) in sig.raw.iter().zip(&tr.injected_powers) {
            assert!((got - want).abs() <= 1e-9 * want, "{got:e} vs {want:e}");
        }
    }
}
