//! Logistic similarity model trained by maximum weighted likelihood.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logistic function, kept strictly inside (0, 1) for every finite input.
pub fn sigmoid(z: f64) -> f64 {
    let g = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    g.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrModel {
    #[serde(rename = "L")]
    pub profile_len: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LrModel {
    pub fn zeros(profile_len: usize) -> Self {
        Self {
            profile_len,
            weights: vec![0.0; profile_len],
            bias: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.profile_len {
            return Err(Error::Shape(format!(
                "model declares L = {} but has {} weights",
                self.profile_len,
                self.weights.len()
            )));
        }
        Ok(())
    }

    pub fn logit(&self, d: &[f64]) -> Result<f64> {
        if d.len() != self.weights.len() {
            return Err(Error::Shape(format!(
                "distance vector of length {} for a model with L = {}",
                d.len(),
                self.weights.len()
            )));
        }
        Ok(self.weights.iter().zip(d).map(|(w, x)| w * x).sum::<f64>() + self.bias)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: LrModel = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }
}

/// Probability that the two identities behind distance vector `d` share a transmitter.
pub fn predict_similarity(model: &LrModel, d: &[f64]) -> Result<f64> {
    Ok(sigmoid(model.logit(d)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub distance: Vec<f64>,
    pub label: u8,
    pub weight: f64,
}

/// Per-class weights inversely proportional to class frequency,
/// scaled so that balanced data gets weight 1.
pub fn compute_class_weights(labels: &[u8]) -> Result<BTreeMap<u8, f64>> {
    let positives = labels.iter().filter(|&&y| y == 1).count();
    let negatives = labels.iter().filter(|&&y| y == 0).count();
    if positives + negatives != labels.len() {
        return Err(Error::TrainingData("labels must be 0 or 1".into()));
    }
    if positives == 0 || negatives == 0 {
        return Err(Error::TrainingData(format!(
            "both classes required ({positives} positive, {negatives} negative)"
        )));
    }
    let n = labels.len() as f64;
    Ok(BTreeMap::from([
        (0, n / (2.0 * negatives as f64)),
        (1, n / (2.0 * positives as f64)),
    ]))
}

/// Attaches class-balancing weights to labelled distance vectors.
pub fn weighted_samples(data: &[(Vec<f64>, u8)]) -> Result<Vec<TrainingSample>> {
    let labels: Vec<u8> = data.iter().map(|(_, y)| *y).collect();
    let weights = compute_class_weights(&labels)?;
    Ok(data
        .iter()
        .map(|(d, y)| TrainingSample {
            distance: d.clone(),
            label: *y,
            weight: weights[y],
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop once the gradient's largest component falls below this.
    pub tolerance: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1.0,
            max_iterations: 1000,
            tolerance: 1e-8,
        }
    }
}

/// Training samples packed row-major for the gradient loop.
struct Packed {
    dim: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    v: Vec<f64>,
    total_weight: f64,
}

impl Packed {
    fn new(samples: &[TrainingSample]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TrainingData("need at least two samples".into()));
        }
        let dim = samples[0].distance.len();
        let mut x = Vec::with_capacity(samples.len() * dim);
        let (mut y, mut v) = (Vec::new(), Vec::new());
        let (mut pos, mut neg) = (false, false);
        for s in samples {
            if s.distance.len() != dim {
                return Err(Error::Shape("training vectors differ in length".into()));
            }
            if !(s.weight > 0.0) {
                return Err(Error::TrainingData("sample weights must be positive".into()));
            }
            match s.label {
                0 => neg = true,
                1 => pos = true,
                _ => return Err(Error::TrainingData("labels must be 0 or 1".into())),
            }
            x.extend_from_slice(&s.distance);
            y.push(s.label as f64);
            v.push(s.weight);
        }
        if !(pos && neg) {
            return Err(Error::TrainingData("both classes required".into()));
        }
        let total_weight = v.iter().sum();
        Ok(Self {
            dim,
            x,
            y,
            v,
            total_weight,
        })
    }

    fn rows(&self) -> impl Iterator<Item = (&[f64], f64, f64)> {
        self.x
            .chunks_exact(self.dim)
            .zip(self.y.iter().zip(&self.v))
            .map(|(row, (&y, &v))| (row, y, v))
    }

    fn logit(w: &[f64], b: f64, row: &[f64]) -> f64 {
        w.iter().zip(row).map(|(a, x)| a * x).sum::<f64>() + b
    }

    /// Weighted log-likelihood divided by the total weight.
    fn objective(&self, w: &[f64], b: f64) -> f64 {
        let s: f64 = self
            .rows()
            .map(|(row, y, v)| {
                let z = Self::logit(w, b, row);
                -v * (y * softplus(-z) + (1.0 - y) * softplus(z))
            })
            .sum();
        s / self.total_weight
    }

    fn gradient(&self, w: &[f64], b: f64, gw: &mut [f64]) -> f64 {
        gw.iter_mut().for_each(|g| *g = 0.0);
        let mut gb = 0.0;
        for (row, y, v) in self.rows() {
            let r = v * (y - sigmoid(Self::logit(w, b, row)));
            for (g, x) in gw.iter_mut().zip(row) {
                *g += r * x;
            }
            gb += r;
        }
        gw.iter_mut().for_each(|g| *g /= self.total_weight);
        gb / self.total_weight
    }
}

/// Normalized weighted log-likelihood of `model` on `samples`.
pub fn weighted_log_likelihood(model: &LrModel, samples: &[TrainingSample]) -> Result<f64> {
    let p = Packed::new(samples)?;
    Ok(p.objective(&model.weights, model.bias))
}

/// Analytic gradient of [`weighted_log_likelihood`] as `(d/dw, d/db)`.
pub fn log_likelihood_gradient(
    model: &LrModel,
    samples: &[TrainingSample],
) -> Result<(Vec<f64>, f64)> {
    let p = Packed::new(samples)?;
    let mut gw = vec![0.0; p.dim];
    let gb = p.gradient(&model.weights, model.bias, &mut gw);
    Ok((gw, gb))
}

/// How often the objective is evaluated for the divergence guard.
const OBJECTIVE_CHECK_EVERY: usize = 100;

/// Full-batch gradient ascent on the weighted log-likelihood from zero parameters.
pub fn train_mwle(samples: &[TrainingSample], config: &TrainingConfig) -> Result<LrModel> {
    let data = Packed::new(samples)?;
    let mut w = vec![0.0; data.dim];
    let mut b = 0.0;
    let mut gw = vec![0.0; data.dim];
    for iter in 0..config.max_iterations {
        let gb = data.gradient(&w, b, &mut gw);
        let gmax = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if !gmax.is_finite() {
            return Err(Error::Divergence(iter));
        }
        if gmax < config.tolerance {
            break;
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi += config.learning_rate * g;
        }
        b += config.learning_rate * gb;
        if iter % OBJECTIVE_CHECK_EVERY == 0 && !data.objective(&w, b).is_finite() {
            return Err(Error::Divergence(iter));
        }
    }
    if !data.objective(&w, b).is_finite() {
        return Err(Error::Divergence(config.max_iterations));
    }
    Ok(LrModel {
        profile_len: data.dim,
        weights: w,
        bias: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(50.0) - 1.0).abs() <= 1e-15);
        let tiny = sigmoid(-1000.0);
        assert!(tiny > 0.0 && tiny.is_finite());
        assert!(sigmoid(1000.0) < 1.0);
    }

    proptest! {
        #[test]
        fn sigmoid_symmetry(z in -700.0f64..700.0) {
            prop_assert!((sigmoid(-z) - (1.0 - sigmoid(z))).abs() <= 1e-15);
            let g = sigmoid(z);
            prop_assert!(g > 0.0 && g < 1.0);
        }
    }

    #[test]
    fn null_model_predicts_half() {
        let m = LrModel::zeros(3);
        assert_eq!(predict_similarity(&m, &[0.3, 1.9, 0.0]).unwrap(), 0.5);
    }

    #[test]
    fn negative_weights_decay_with_distance() {
        let m = LrModel {
            profile_len: 2,
            weights: vec![-3.0, -2.0],
            bias: 0.0,
        };
        assert_eq!(predict_similarity(&m, &[0.0, 0.0]).unwrap(), 0.5);
        assert!(predict_similarity(&m, &[2.0, 2.0]).unwrap() < 1e-4);
        assert!(predict_similarity(&m, &[1.0]).is_err());
    }

    #[test]
    fn prediction_matches_manual_dot_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let w: Vec<f64> = (0..10).map(|_| rng.random_range(-5.0..5.0)).collect();
            let d: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..2.0)).collect();
            let b = rng.random_range(-3.0..3.0);
            let mut z = b;
            for i in 0..10 {
                z += w[i] * d[i];
            }
            let m = LrModel { profile_len: 10, weights: w, bias: b };
            let expected = 1.0 / (1.0 + (-z).exp());
            assert!((predict_similarity(&m, &d).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn class_weights() {
        let w = compute_class_weights(&[0, 1, 0, 1]).unwrap();
        assert_eq!((w[&0], w[&1]), (1.0, 1.0));
        let w = compute_class_weights(&[1, 0, 0, 0, 0]).unwrap();
        assert!((w[&1] - 2.5).abs() < 1e-12);
        assert!((w[&0] - 0.625).abs() < 1e-12);
        assert!(matches!(compute_class_weights(&[1, 1]), Err(Error::TrainingData(_))));
    }

    #[test]
    fn class_weights_match_counting_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let labels: Vec<u8> = (0..997).map(|_| u8::from(rng.random_bool(0.2))).collect();
        let w = compute_class_weights(&labels).unwrap();
        let mut counts = [0usize; 2];
        for &y in &labels {
            counts[y as usize] += 1;
        }
        for c in 0..2u8 {
            let expected = labels.len() as f64 / (2.0 * counts[c as usize] as f64);
            assert_eq!(w[&c], expected);
        }
        // each class contributes half of the total weight
        let total_pos: f64 = labels.iter().filter(|&&y| y == 1).map(|_| w[&1]).sum();
        assert!((total_pos - labels.len() as f64 / 2.0).abs() < 1e-9);
    }

    fn separable() -> Vec<TrainingSample> {
        let pts = [
            ([0.1, 0.2], 1),
            ([0.3, 0.1], 1),
            ([0.2, 0.4], 1),
            ([1.2, 1.5], 0),
            ([1.6, 0.9], 0),
            ([1.1, 1.8], 0),
            ([1.9, 1.4], 0),
        ];
        let data: Vec<(Vec<f64>, u8)> = pts.iter().map(|(d, y)| (d.to_vec(), *y)).collect();
        weighted_samples(&data).unwrap()
    }

    #[test]
    fn separable_set_is_fit_exactly() {
        let samples = separable();
        let model = train_mwle(&samples, &TrainingConfig::default()).unwrap();
        for s in &samples {
            let p = predict_similarity(&model, &s.distance).unwrap();
            assert_eq!(u8::from(p >= 0.5), s.label, "{:?} -> {p}", s.distance);
        }
    }

    #[test]
    fn uniform_weights_equal_unweighted() {
        let mut a = separable();
        a.iter_mut().for_each(|s| s.weight = 1.0);
        let mut b = a.clone();
        b.iter_mut().for_each(|s| s.weight = 3.0);
        let cfg = TrainingConfig::default();
        let ma = train_mwle(&a, &cfg).unwrap();
        let mb = train_mwle(&b, &cfg).unwrap();
        for (x, y) in ma.weights.iter().zip(&mb.weights) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((ma.bias - mb.bias).abs() < 1e-9);
    }

    #[test]
    fn duplicated_half_weight_samples_give_same_optimum() {
        let a = separable();
        let b: Vec<TrainingSample> = a
            .iter()
            .flat_map(|s| {
                let h = TrainingSample { weight: s.weight / 2.0, ..s.clone() };
                [h.clone(), h]
            })
            .collect();
        let cfg = TrainingConfig::default();
        let ma = train_mwle(&a, &cfg).unwrap();
        let mb = train_mwle(&b, &cfg).unwrap();
        for (x, y) in ma.weights.iter().zip(&mb.weights) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn training_is_bit_deterministic() {
        let s = separable();
        let cfg = TrainingConfig::default();
        assert_eq!(train_mwle(&s, &cfg).unwrap(), train_mwle(&s, &cfg).unwrap());
    }

    #[test]
    fn rejects_single_class() {
        let s = vec![
            TrainingSample { distance: vec![0.1], label: 1, weight: 1.0 },
            TrainingSample { distance: vec![0.2], label: 1, weight: 1.0 },
        ];
        assert!(matches!(
            train_mwle(&s, &TrainingConfig::default()),
            Err(Error::TrainingData(_))
        ));
    }

    #[test]
    fn non_finite_inputs_diverge() {
        let s = vec![
            TrainingSample { distance: vec![f64::INFINITY], label: 1, weight: 1.0 },
            TrainingSample { distance: vec![0.2], label: 0, weight: 1.0 },
        ];
        assert!(matches!(
            train_mwle(&s, &TrainingConfig::default()),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn model_json_field_names() {
        let m = LrModel { profile_len: 2, weights: vec![-1.5, 0.25], bias: 0.75 };
        let v: serde_json::Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(v["L"], 2);
        assert_eq!(v["bias"], 0.75);
        assert_eq!(v["weights"][0], -1.5);
        assert_eq!(LrModel::from_json(&m.to_json().unwrap()).unwrap(), m);
        assert!(LrModel::from_json(r#"{"L": 3, "weights": [1.0], "bias": 0.0}"#).is_err());
    }
}
