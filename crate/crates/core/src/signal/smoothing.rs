use crate::error::{Error, Result};

/// Centered moving average with edge truncation.
///
/// Output `n` averages the input over `[n - (w-1)/2, n + w/2]` clipped to the
/// sequence, so an odd window is symmetric and `window == 1` is the identity.
pub fn moving_average(samples: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window > samples.len() {
        return Err(Error::Parameter(format!(
            "moving-average window {window} invalid for {} samples",
            samples.len()
        )));
    }
    if window == 1 {
        return Ok(samples.to_vec());
    }
    let mut prefix = Vec::with_capacity(samples.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &s in samples {
        acc += s;
        prefix.push(acc);
    }
    let back = (window - 1) / 2;
    let ahead = window / 2;
    let len = samples.len();
    Ok((0..len)
        .map(|n| {
            let lo = n.saturating_sub(back);
            let hi = (n + ahead + 1).min(len);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect())
}
