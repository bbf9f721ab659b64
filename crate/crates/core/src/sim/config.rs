//! Scenario description, loadable from TOML.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::agent::{IdentityId, RobotAgent};
use super::channel::ChannelParams;
use super::code::TagCode;
use super::geometry::{Point2, TagLayout};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};

/// Additive Gaussian noise on trace magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// Standard deviation set from the strongest tag reflection of each trace.
    /// Samples are powers, so the ratio is taken between powers: `std = p / 10^(snr/10)`.
    Snr { snr_db: f64 },
    /// Fixed standard deviation in trace units.
    Absolute { std: f64 },
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::Snr { snr_db: 20.0 }
    }
}

impl NoiseModel {
    pub fn std_for(&self, strongest_reflection: f64) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::Snr { snr_db } => strongest_reflection / 10f64.powf(snr_db / 10.0),
            NoiseModel::Absolute { std } => std,
        }
    }
}

/// Sample-level layout of one received packet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceLayout {
    pub sample_rate_hz: f64,
    pub samples_per_bit: usize,
    /// Ambient-only samples before the first tag slot.
    pub guard_prefix: usize,
    /// Ambient-only samples after the last tag slot.
    pub guard_suffix: usize,
    pub code: TagCode,
}

impl Default for TraceLayout {
    fn default() -> Self {
        Self {
            sample_rate_hz: 8_000.0,
            samples_per_bit: 8,
            guard_prefix: 256,
            guard_suffix: 256,
            code: TagCode::default_code(),
        }
    }
}

impl TraceLayout {
    /// Samples in one tag slot.
    pub fn block_len(&self) -> usize {
        self.code.len() * self.samples_per_bit
    }

    pub fn backscatter_len(&self, num_tags: usize) -> usize {
        self.block_len() * num_tags
    }

    pub fn trace_len(&self, num_tags: usize) -> usize {
        self.guard_prefix + self.backscatter_len(num_tags) + self.guard_suffix
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz > 0.0) {
            return Err(Error::Config("sample rate must be positive".into()));
        }
        if self.samples_per_bit == 0 {
            return Err(Error::Config("samples_per_bit must be at least 1".into()));
        }
        TagCode::from_bits(self.code.0.clone()).map(|_| ())
    }
}

/// Tag ring around the receiver antenna.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagConfig {
    pub count: usize,
    pub ring_radius_m: f64,
    /// Explicit body-frame positions; defaults to an even ring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Point2>>,
}

impl Default for TagConfig {
    fn default() -> Self {
        Self {
            count: 4,
            ring_radius_m: 0.12,
            positions: None,
        }
    }
}

impl TagConfig {
    pub fn layout(&self) -> Result<TagLayout> {
        match &self.positions {
            Some(p) => {
                if p.len() != self.count {
                    return Err(Error::Config(format!(
                        "tag count {} disagrees with {} explicit positions",
                        self.count,
                        p.len()
                    )));
                }
                let layout = TagLayout {
                    tag_positions: p.clone(),
                    ring_radius_m: self.ring_radius_m,
                };
                layout.validate()?;
                Ok(layout)
            }
            None => TagLayout::ring(self.count, self.ring_radius_m),
        }
    }
}

fn default_ambient() -> f64 {
    1e-6
}

/// World, receiver, transmitters and timing of one simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub horizon_s: f64,
    pub period_s: f64,
    #[serde(default)]
    pub seed: u64,
    /// Constant level of the compound direct path.
    #[serde(default = "default_ambient")]
    pub ambient_level: f64,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub channel: ChannelParams,
    #[serde(default)]
    pub tags: TagConfig,
    #[serde(default)]
    pub trace: TraceLayout,
    /// Path of the receiving robot that carries the tags.
    pub receiver: Trajectory,
    #[serde(default)]
    pub agents: Vec<RobotAgent>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Number of update periods that fit in the horizon.
    pub fn periods(&self) -> usize {
        let n = self.horizon_s / self.period_s;
        (n + 1e-9).floor() as usize
    }

    pub fn num_tags(&self) -> usize {
        self.tags.count
    }

    pub fn identities(&self) -> impl Iterator<Item = (&RobotAgent, &IdentityId)> {
        self.agents
            .iter()
            .flat_map(|a| a.identities.iter().map(move |id| (a, id)))
    }

    pub fn agent_of(&self, identity: &IdentityId) -> Option<&RobotAgent> {
        self.agents.iter().find(|a| a.claims(identity))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon_s > 0.0) || !(self.period_s > 0.0) {
            return Err(Error::Config("horizon and period must be positive".into()));
        }
        if !(self.ambient_level >= 0.0) {
            return Err(Error::Config("ambient level must be non-negative".into()));
        }
        self.channel.validate()?;
        self.tags.layout()?;
        self.trace.validate()?;
        self.receiver.validate()?;
        let need_until = self.horizon_s;
        let covers = |tr: &Trajectory| tr.start_time() <= 0.0 && tr.end_time() >= need_until;
        if !covers(&self.receiver) {
            return Err(Error::Config(format!(
                "receiver trajectory does not cover [0, {need_until}] s"
            )));
        }
        let mut seen = BTreeSet::new();
        for agent in &self.agents {
            agent.validate()?;
            if !covers(&agent.trajectory) {
                return Err(Error::Config(format!(
                    "trajectory of {} ends at {} s, before the {} s horizon",
                    agent.source,
                    agent.trajectory.end_time(),
                    need_until
                )));
            }
            for id in &agent.identities {
                if !seen.insert(id.clone()) {
                    return Err(Error::Config(format!("identity {id} claimed twice")));
                }
            }
        }
        Ok(())
    }
}
