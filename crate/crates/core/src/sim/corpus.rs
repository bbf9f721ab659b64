//! Seeded generator for the desk-scale scenario corpus.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::agent::{IdentityId, RobotAgent};
use super::config::{NoiseModel, ScenarioConfig, TagConfig, TraceLayout};
use super::channel::ChannelParams;
use super::geometry::Point2;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub scenarios: usize,
    pub horizon_s: f64,
    pub period_s: f64,
    pub min_robots: usize,
    pub max_robots: usize,
    /// Fraction of robots that act as Sybil attackers (at least one per scenario).
    pub attacker_fraction: f64,
    pub min_identities_per_attacker: usize,
    pub max_identities_per_attacker: usize,
    /// Per-identity transmit power scale range for attackers, drawn log-uniformly.
    pub power_scaling: Option<(f64, f64)>,
    pub num_tags: usize,
    pub ring_radius_m: f64,
    pub noise: NoiseModel,
    pub tx_power_w: f64,
    pub robot_speed_mps: f64,
    pub receiver_speed_mps: f64,
    /// Half side of the receiver's square patrol around the room center.
    pub patrol_half_side_m: f64,
    /// Robots keep at least this far from the receiver's patrol center.
    pub keep_out_m: f64,
    pub trace: TraceLayout,
    pub channel: ChannelParams,
    pub ambient_level: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            scenarios: 20,
            horizon_s: 60.0,
            period_s: 0.6,
            min_robots: 4,
            max_robots: 8,
            attacker_fraction: 0.5,
            min_identities_per_attacker: 2,
            max_identities_per_attacker: 4,
            power_scaling: None,
            num_tags: 4,
            ring_radius_m: 0.12,
            noise: NoiseModel::Snr { snr_db: 20.0 },
            tx_power_w: 0.01,
            robot_speed_mps: 0.2,
            receiver_speed_mps: 0.05,
            patrol_half_side_m: 0.2,
            keep_out_m: 0.8,
            trace: TraceLayout::default(),
            channel: ChannelParams::default(),
            ambient_level: 1e-6,
        }
    }
}

/// Indoor office and outdoor rooftop floor plans, alternated across scenarios.
const ROOMS: [(f64, f64); 2] = [(4.5, 5.5), (8.0, 10.0)];

impl CorpusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scenarios == 0 {
            return Err(Error::Config("corpus needs at least one scenario".into()));
        }
        if self.min_robots < 2 || self.max_robots < self.min_robots {
            return Err(Error::Config("robot count range must be 2 <= min <= max".into()));
        }
        if self.min_identities_per_attacker < 2
            || self.max_identities_per_attacker < self.min_identities_per_attacker
        {
            return Err(Error::Config("attackers claim at least two identities".into()));
        }
        if let Some((lo, hi)) = self.power_scaling {
            if !(lo > 0.0 && hi >= lo) {
                return Err(Error::Config("power scaling range must be 0 < lo <= hi".into()));
            }
        }
        Ok(())
    }

    /// Scenario seeds of the corpus derived from `corpus_seed`; kept to 63 bits
    /// so scenario files can store them as TOML integers.
    pub fn scenario_seeds(&self, corpus_seed: u64) -> Vec<u64> {
        (0..self.scenarios)
            .map(|i| derive_seed(corpus_seed, &[0x5ce0, i as u64]) >> 1)
            .collect()
    }

    pub fn generate(&self, corpus_seed: u64) -> Result<Vec<ScenarioConfig>> {
        self.validate()?;
        self.scenario_seeds(corpus_seed)
            .into_iter()
            .enumerate()
            .map(|(i, seed)| self.scenario(i, seed))
            .collect()
    }

    /// Builds scenario `index`. Geometry and power scales use separate random
    /// streams, so toggling `power_scaling` leaves trajectories untouched.
    pub fn scenario(&self, index: usize, seed: u64) -> Result<ScenarioConfig> {
        let mut geo = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1]));
        let mut power = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[2]));
        let (w, h) = ROOMS[index % ROOMS.len()];
        let center = Point2::new(w / 2.0, h / 2.0);
        // covers the packet that starts at the horizon
        let duration = self.horizon_s + 1.0;

        let receiver = patrol(center, self.patrol_half_side_m, self.receiver_speed_mps, duration)?;

        let robots = geo.random_range(self.min_robots..=self.max_robots);
        let attackers = ((robots as f64 * self.attacker_fraction).round() as usize).clamp(1, robots - 1);
        let margin = 0.3;
        let bounds = (Point2::new(margin, margin), Point2::new(w - margin, h - margin));

        let mut agents = Vec::with_capacity(robots);
        for r in 0..robots {
            let trajectory = Trajectory::random_walk(
                &mut geo,
                bounds,
                center,
                self.keep_out_m,
                self.robot_speed_mps,
                duration,
            )?;
            let source = format!("s{index:02}r{r}");
            if r < attackers {
                let n_ids = geo.random_range(
                    self.min_identities_per_attacker..=self.max_identities_per_attacker,
                );
                let identities: Vec<IdentityId> = (0..n_ids)
                    .map(|j| IdentityId(format!("{source}i{j}")))
                    .collect();
                let mut power_scale = BTreeMap::new();
                for id in &identities {
                    // drawn unconditionally to keep the stream aligned
                    let u: f64 = power.random();
                    if let Some((lo, hi)) = self.power_scaling {
                        let alpha = (lo.ln() + u * (hi.ln() - lo.ln())).exp();
                        power_scale.insert(id.clone(), alpha);
                    }
                }
                agents.push(RobotAgent {
                    source: source.as_str().into(),
                    identities,
                    power_scale,
                    tx_power_w: self.tx_power_w,
                    trajectory,
                });
            } else {
                agents.push(RobotAgent::legitimate(&source, self.tx_power_w, trajectory));
            }
        }

        let cfg = ScenarioConfig {
            name: format!("desk-{index:02}"),
            horizon_s: self.horizon_s,
            period_s: self.period_s,
            seed,
            ambient_level: self.ambient_level,
            noise: self.noise,
            channel: self.channel,
            tags: TagConfig {
                count: self.num_tags,
                ring_radius_m: self.ring_radius_m,
                positions: None,
            },
            trace: self.trace.clone(),
            receiver,
            agents,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Slow square loop of half-width `half_side_m` around `center`.
fn patrol(center: Point2, half_side_m: f64, speed_mps: f64, duration_s: f64) -> Result<Trajectory> {
    let corners = [
        Point2::new(center.x - half_side_m, center.y - half_side_m),
        Point2::new(center.x + half_side_m, center.y - half_side_m),
        Point2::new(center.x + half_side_m, center.y + half_side_m),
        Point2::new(center.x - half_side_m, center.y + half_side_m),
    ];
    let lap = 8.0 * half_side_m / speed_mps;
    let laps = (duration_s / lap).ceil() as usize + 1;
    let mut points = Vec::with_capacity(4 * laps + 1);
    for _ in 0..laps {
        points.extend_from_slice(&corners);
    }
    points.push(corners[0]);
    Trajectory::through(&points, speed_mps, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_valid() {
        let cc = CorpusConfig {
            scenarios: 3,
            ..CorpusConfig::default()
        };
        let a = cc.generate(11).unwrap();
        let b = cc.generate(11).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(s.agents.iter().any(|ag| ag.is_attacker()));
            assert!(s.agents.iter().any(|ag| !ag.is_attacker()));
            assert!((4..=8).contains(&s.agents.len()));
        }
    }

    #[test]
    fn power_scaling_only_changes_alpha() {
        let plain = CorpusConfig {
            scenarios: 2,
            ..CorpusConfig::default()
        };
        let scaled = CorpusConfig {
            power_scaling: Some((0.25, 4.0)),
            ..plain.clone()
        };
        let a = plain.generate(5).unwrap();
        let b = scaled.generate(5).unwrap();
        for (sa, sb) in a.iter().zip(&b) {
            for (x, y) in sa.agents.iter().zip(&sb.agents) {
                assert_eq!(x.trajectory, y.trajectory);
                assert_eq!(x.identities, y.identities);
                for alpha in y.power_scale.values() {
                    assert!((0.25..=4.0).contains(alpha));
                }
            }
        }
    }
}
