use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::correlation::{argmax, correlate};
use super::smoothing::moving_average;
use crate::error::{Error, Result};
use crate::sim::ReceivedTrace;

/// Default smoothing window, about one code bit at 8 samples per bit.
pub const DEFAULT_SMOOTHING_WINDOW: usize = 9;

/// A detected code must beat the correlation noise by this many standard deviations.
pub const PEAK_FLOOR_SIGMAS: f64 = 6.0;

/// Location of the backscattered region inside a trace (0-based, half-open).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentBounds {
    pub t_start: usize,
    pub t_end: usize,
    pub block_len: usize,
}

impl SegmentBounds {
    pub fn num_blocks(&self) -> usize {
        (self.t_end - self.t_start) / self.block_len
    }

    /// Sample range of tag `k` (0-based).
    pub fn block(&self, k: usize) -> Range<usize> {
        let start = self.t_start + k * self.block_len;
        start..start + self.block_len
    }
}

/// Finds where the tags start backscattering.
///
/// The start is the first maximum of the correlation between the smoothed
/// samples and the known code repeated over all tag slots. A trace is rejected
/// when the peak does not stand out from the correlation's noise level, which
/// is estimated from sample-to-sample differences of the raw trace.
pub fn segment_backscatter(trace: &ReceivedTrace, window: usize) -> Result<SegmentBounds> {
    let reference = trace
        .tag_code
        .expand(trace.samples_per_bit, trace.num_tags);
    let smoothed = moving_average(&trace.samples, window)?;
    let c = correlate(&smoothed, &reference)?;
    let t_start = argmax(&c).ok_or_else(|| Error::Parameter("empty correlation".into()))?;

    let peak = c[t_start];
    let excess = peak - median(&c);
    let ones = reference.iter().filter(|&&b| b == 1).count() as f64;
    let floor = (PEAK_FLOOR_SIGMAS * noise_std(&trace.samples) * ones.sqrt())
        .max(1e-9 * peak.abs());
    if !(excess > floor) {
        return Err(Error::Segmentation { excess, floor });
    }
    Ok(SegmentBounds {
        t_start,
        t_end: t_start + reference.len(),
        block_len: trace.block_len(),
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Robust white-noise level from the median absolute first difference.
fn noise_std(samples: &[f64]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let diffs: Vec<f64> = samples.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    median(&diffs) / (0.674_489_750_196_081_7 * std::f64::consts::SQRT_2)
}
