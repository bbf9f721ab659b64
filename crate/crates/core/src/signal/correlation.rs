use crate::error::{Error, Result};

/// Sliding correlation of a signal with a 0/1 reference:
/// `c[n] = sum_m smoothed[n + m] * code[m]` for every full overlap.
///
/// Evaluated over runs of ones in `code` with prefix sums, so the cost per lag
/// is proportional to the number of runs rather than the code length.
pub fn correlate(smoothed: &[f64], code: &[u8]) -> Result<Vec<f64>> {
    if code.is_empty() || code.len() > smoothed.len() {
        return Err(Error::Parameter(format!(
            "code of length {} does not fit a signal of length {}",
            code.len(),
            smoothed.len()
        )));
    }
    let runs = runs_of_ones(code);
    let mut prefix = Vec::with_capacity(smoothed.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &s in smoothed {
        acc += s;
        prefix.push(acc);
    }
    let lags = smoothed.len() - code.len() + 1;
    Ok((0..lags)
        .map(|n| {
            runs.iter()
                .map(|&(start, end)| prefix[n + end] - prefix[n + start])
                .sum()
        })
        .collect())
}

/// Half-open `[start, end)` runs of ones.
fn runs_of_ones(code: &[u8]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &b) in code.iter().enumerate() {
        match (b != 0, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, code.len()));
    }
    runs
}

/// Index of the first maximum.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}
