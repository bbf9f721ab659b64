//! Row-wise distances between signal profiles.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SignalProfile;
use crate::sim::IdentityId;

/// Centered vectors shorter than this carry no direction.
pub const CENTERING_EPS: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine of the angle between nonzero vectors. Dividing by the root of the
/// product of squared norms makes identical vectors come out at exactly 1.
fn cosine(a: &[f64], b: &[f64]) -> f64 {
    (dot(a, b) / (dot(a, a) * dot(b, b)).sqrt()).clamp(-1.0, 1.0)
}

fn check_dims(f: &[f64], g: &[f64]) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::Shape(format!(
            "vectors of length {} and {}",
            f.len(),
            g.len()
        )));
    }
    Ok(())
}

/// `1 - cos(f, g)`.
pub fn cosine_distance(f: &[f64], g: &[f64]) -> Result<f64> {
    check_dims(f, g)?;
    let (nf, ng) = (norm(f), norm(g));
    if nf == 0.0 || ng == 0.0 {
        return Err(Error::Domain("cosine distance of a zero vector".into()));
    }
    Ok(1.0 - cosine(f, g))
}

/// Cosine distance after subtracting `mean_f` from both vectors.
///
/// `mean_f` is the mean row of the profile `f` came from, so the distance
/// depends on which profile is taken as the reference.
pub fn adjusted_cosine_distance(f: &[f64], g: &[f64], mean_f: &[f64]) -> Result<f64> {
    check_dims(f, g)?;
    check_dims(f, mean_f)?;
    let fc: Vec<f64> = f.iter().zip(mean_f).map(|(a, m)| a - m).collect();
    let gc: Vec<f64> = g.iter().zip(mean_f).map(|(a, m)| a - m).collect();
    let (nf, ng) = (norm(&fc), norm(&gc));
    if nf < CENTERING_EPS || ng < CENTERING_EPS {
        return Err(Error::DegenerateCentering);
    }
    Ok(1.0 - cosine(&fc, &gc))
}

/// Adjusted cosine with degenerate centering resolved: a reference row sitting
/// on its own mean scores 0, a compared row sitting on the reference mean scores 1.
fn adjusted_cosine_or_fallback(f: &[f64], g: &[f64], mean_f: &[f64]) -> f64 {
    match adjusted_cosine_distance(f, g, mean_f) {
        Ok(d) => d,
        Err(_) => {
            let fc = f.iter().zip(mean_f).map(|(a, m)| (a - m).powi(2)).sum::<f64>();
            if fc.sqrt() < CENTERING_EPS {
                0.0
            } else {
                1.0
            }
        }
    }
}

/// Distance from profile `from` to profile `to`, one value per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceVector {
    pub from: IdentityId,
    pub to: IdentityId,
    pub values: Vec<f64>,
}

/// Row metric used to build distance vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    AdjustedCosine,
    Cosine,
    Manhattan,
    Euclidean,
    Chebyshev,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::AdjustedCosine,
        Metric::Cosine,
        Metric::Manhattan,
        Metric::Euclidean,
        Metric::Chebyshev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::AdjustedCosine => "adjusted-cosine",
            Metric::Cosine => "cosine",
            Metric::Manhattan => "manhattan",
            Metric::Euclidean => "euclidean",
            Metric::Chebyshev => "chebyshev",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown metric {s:?}")))
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Standard vector distances used as baselines.
pub fn baseline_distance(f: &[f64], g: &[f64], metric: Metric) -> Result<f64> {
    check_dims(f, g)?;
    let diffs = f.iter().zip(g).map(|(a, b)| (a - b).abs());
    Ok(match metric {
        Metric::Manhattan => diffs.sum(),
        Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        Metric::Chebyshev => diffs.fold(0.0, f64::max),
        Metric::Cosine => return cosine_distance(f, g),
        Metric::AdjustedCosine => {
            return Err(Error::Parameter(
                "adjusted cosine needs a profile mean; use profile_distance_vector".into(),
            ))
        }
    })
}

fn check_profiles(a: &SignalProfile, b: &SignalProfile) -> Result<()> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "profiles {}x{} and {}x{}",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    Ok(())
}

/// Adjusted-cosine distance vector from `f` to `g`, centered on `f`'s mean.
pub fn profile_distance_vector(f: &SignalProfile, g: &SignalProfile) -> Result<DistanceVector> {
    profile_distance_with(f, g, Metric::AdjustedCosine)
}

pub fn profile_distance_with(
    f: &SignalProfile,
    g: &SignalProfile,
    metric: Metric,
) -> Result<DistanceVector> {
    check_profiles(f, g)?;
    let values = f
        .rows
        .iter()
        .zip(&g.rows)
        .map(|(fr, gr)| match metric {
            Metric::AdjustedCosine => Ok(adjusted_cosine_or_fallback(fr, gr, &f.mean)),
            other => baseline_distance(fr, gr, other),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DistanceVector {
        from: f.identity.clone(),
        to: g.identity.clone(),
        values,
    })
}

/// All pairwise distance vectors; `entries[i][j]` is `None` on the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub identities: Vec<IdentityId>,
    pub entries: Vec<Vec<Option<DistanceVector>>>,
    pub profile_len: usize,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    /// Distance vector from `i` to `j`; the zero vector on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> Vec<f64> {
        match &self.entries[i][j] {
            Some(d) => d.values.clone(),
            None => vec![0.0; self.profile_len],
        }
    }

    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, &DistanceVector)> {
        self.entries.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(j, d)| d.as_ref().map(|d| (i, j, d)))
        })
    }
}

pub fn distance_matrix(profiles: &[SignalProfile]) -> Result<DistanceMatrix> {
    distance_matrix_with(profiles, Metric::AdjustedCosine)
}

pub fn distance_matrix_with(profiles: &[SignalProfile], metric: Metric) -> Result<DistanceMatrix> {
    if profiles.len() < 2 {
        return Err(Error::Parameter(format!(
            "distance matrix needs at least 2 profiles, got {}",
            profiles.len()
        )));
    }
    let entries = profiles
        .iter()
        .enumerate()
        .map(|(i, f)| {
            profiles
                .iter()
                .enumerate()
                .map(|(j, g)| {
                    if i == j {
                        check_profiles(f, g).map(|_| None)
                    } else {
                        profile_distance_with(f, g, metric).map(Some)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DistanceMatrix {
        identities: profiles.iter().map(|p| p.identity.clone()).collect(),
        entries,
        profile_len: profiles[0].len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn profile(id: &str, rows: Vec<Vec<f64>>) -> SignalProfile {
        SignalProfile::from_rows(id.into(), rows).unwrap()
    }

    #[test]
    fn cosine_identities() {
        assert_eq!(cosine_distance(&[0.6, 0.8], &[0.6, 0.8]).unwrap(), 0.0);
        assert_eq!(cosine_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        let d = cosine_distance(&[1.0, 0.0], &[S2, S2]).unwrap();
        assert!((d - 0.292_893_218_813_452_5).abs() < 1e-12);
        assert!(cosine_distance(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn adjusted_cosine_identities() {
        let f = [0.3, 0.9, 0.1];
        let g = [0.5, 0.2, 0.8];
        assert_eq!(
            adjusted_cosine_distance(&f, &g, &[0.0; 3]).unwrap(),
            cosine_distance(&f, &g).unwrap()
        );
        assert!(adjusted_cosine_distance(&f, &f, &[0.2, 0.2, 0.2]).unwrap().abs() < 1e-15);
        let d = adjusted_cosine_distance(&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5]).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        assert_eq!(
            adjusted_cosine_distance(&[0.5, 0.5], &[0.0, 1.0], &[0.5, 0.5]),
            Err(Error::DegenerateCentering)
        );
    }

    #[test]
    fn baselines() {
        assert_eq!(baseline_distance(&[0.0, 0.0], &[1.0, 1.0], Metric::Manhattan).unwrap(), 2.0);
        assert_eq!(baseline_distance(&[0.0, 0.0], &[3.0, 4.0], Metric::Euclidean).unwrap(), 5.0);
        assert_eq!(baseline_distance(&[1.0, 5.0], &[4.0, 1.0], Metric::Chebyshev).unwrap(), 4.0);
        assert!("minkowski".parse::<Metric>().is_err());
        assert_eq!("chebyshev".parse::<Metric>().unwrap(), Metric::Chebyshev);
    }

    #[test]
    fn self_distance_is_zero() {
        let f = profile("f", vec![vec![1.0, 0.0], vec![S2, S2], vec![0.0, 1.0]]);
        let d = profile_distance_vector(&f, &f).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0), "{:?}", d.values);
    }

    #[test]
    fn degenerate_rows_fall_back() {
        // middle row equals the mean of F
        let f = profile("f", vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]]);
        let g = profile("g", vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]]);
        let d = profile_distance_vector(&f, &g).unwrap();
        assert_eq!(d.values[1], 0.0);
        // g row equals f's mean while f's row does not
        let c = profile("c", vec![vec![0.5, 0.5]; 3]);
        let h = profile("h", vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);
        let d = profile_distance_vector(&h, &c).unwrap();
        assert_eq!(d.values[1], 1.0);
    }

    #[test]
    fn asymmetric_witness() {
        let f = profile("f", vec![vec![1.0, 0.0], vec![0.8, 0.6], vec![0.6, 0.8]]);
        let g = profile("g", vec![vec![0.6, 0.8], vec![0.0, 1.0], vec![S2, S2]]);
        let fg = profile_distance_vector(&f, &g).unwrap();
        let gf = profile_distance_vector(&g, &f).unwrap();
        assert_ne!(fg.values, gf.values);
    }

    #[test]
    fn matrix_counts() {
        let mk = |id: &str, a: f64| {
            let r = [a, (1.0 - a * a).sqrt()];
            profile(id, vec![r.to_vec(), vec![r[1], r[0]]])
        };
        let two = distance_matrix(&[mk("a", 0.3), mk("b", 0.9)]).unwrap();
        assert_eq!(two.off_diagonal().count(), 2);
        let five: Vec<_> = ["a", "b", "c", "d", "e"]
            .iter()
            .enumerate()
            .map(|(i, id)| mk(id, 0.1 + 0.15 * i as f64))
            .collect();
        let m = distance_matrix(&five).unwrap();
        assert_eq!(m.off_diagonal().count(), 20);
        assert_eq!(m.get(2, 2), vec![0.0, 0.0]);
        assert!(distance_matrix(&five[..1]).is_err());
    }

    #[test]
    fn duplicate_profiles_have_zero_mutual_distance() {
        let p = profile("a", vec![vec![1.0, 0.0], vec![0.6, 0.8], vec![0.0, 1.0]]);
        let mut q = p.clone();
        q.identity = "b".into();
        let m = distance_matrix(&[p, q]).unwrap();
        for (_, _, d) in m.off_diagonal() {
            assert!(d.values.iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn shape_mismatch() {
        let f = profile("f", vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let g = profile("g", vec![vec![1.0, 0.0]]);
        assert!(matches!(profile_distance_vector(&f, &g), Err(Error::Shape(_))));
    }

    fn unit_row(k: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.01f64..1.0, k).prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
    }

    fn unit_profile(l: usize, k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(unit_row(k), l)
    }

    proptest! {
        #[test]
        fn ranges_hold(f in unit_row(4), g in unit_row(4), m in unit_row(4)) {
            let c = cosine_distance(&f, &g).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
            if let Ok(a) = adjusted_cosine_distance(&f, &g, &m) {
                prop_assert!((0.0..=2.0).contains(&a));
            }
        }

        #[test]
        fn vector_matches_row_by_row_oracle(rf in unit_profile(6, 4), rg in unit_profile(6, 4)) {
            let f = profile("f", rf.clone());
            let g = profile("g", rg.clone());
            let d = profile_distance_vector(&f, &g).unwrap();
            // recompute the mean and each centered cosine independently
            let l = rf.len() as f64;
            let mean: Vec<f64> = (0..4).map(|k| rf.iter().map(|r| r[k]).sum::<f64>() / l).collect();
            for (idx, (a, b)) in rf.iter().zip(&rg).enumerate() {
                let ac: Vec<f64> = (0..4).map(|k| a[k] - mean[k]).collect();
                let bc: Vec<f64> = (0..4).map(|k| b[k] - mean[k]).collect();
                let num: f64 = (0..4).map(|k| ac[k] * bc[k]).sum();
                let den = (0..4).map(|k| ac[k] * ac[k]).sum::<f64>().sqrt()
                    * (0..4).map(|k| bc[k] * bc[k]).sum::<f64>().sqrt();
                let expected = 1.0 - num / den;
                prop_assert!((d.values[idx] - expected).abs() <= 1e-12);
            }
        }

        #[test]
        fn self_distance_zero_for_any_profile(rf in unit_profile(5, 3)) {
            let f = profile("f", rf);
            let d = profile_distance_vector(&f, &f).unwrap();
            prop_assert!(d.values.iter().all(|&v| v == 0.0), "{:?}", d.values);
        }
    }
}
