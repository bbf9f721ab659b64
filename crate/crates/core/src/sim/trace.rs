use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::agent::{IdentityId, RobotAgent};
use super::channel::reflected_power;
use super::code::TagCode;
use super::config::ScenarioConfig;
use crate::error::{Error, Result};

/// One received packet for one claimed identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceivedTrace {
    pub identity: IdentityId,
    /// Time of the first sample.
    pub t_s: f64,
    pub sample_rate_hz: f64,
    pub samples: Vec<f64>,
    /// 0 outside the tag slots, `k` (1-based) inside tag `k`'s slot.
    pub tag_schedule: Vec<u16>,
    pub tag_code: TagCode,
    pub samples_per_bit: usize,
    pub num_tags: usize,
    /// Generator ground truth: index of the first backscattered sample.
    pub backscatter_start: usize,
    /// Generator ground truth: noise-free reflected power per tag.
    pub injected_powers: Vec<f64>,
    pub noise_std: f64,
}

impl ReceivedTrace {
    pub fn block_len(&self) -> usize {
        self.tag_code.len() * self.samples_per_bit
    }

    /// Length of the backscattered region (all tag slots).
    pub fn backscatter_len(&self) -> usize {
        self.block_len() * self.num_tags
    }

    /// Whether the code has the tag reflecting at `offset` samples into its slot.
    pub fn reflecting_at(&self, offset: usize) -> bool {
        self.tag_code.bits()[(offset / self.samples_per_bit) % self.tag_code.len()] == 1
    }

    /// Reflect mask of one tag slot.
    pub fn block_mask(&self) -> Vec<bool> {
        (0..self.block_len()).map(|n| self.reflecting_at(n)).collect()
    }

    /// Sample time of index `n`.
    pub fn sample_time(&self, n: usize) -> f64 {
        self.t_s + n as f64 / self.sample_rate_hz
    }
}

/// Synthesizes the trace received from `identity` at time `t_s`.
///
/// Samples are the ambient level of the compound direct path, plus each tag's
/// reflected power whenever that tag reflects in its slot, plus Gaussian noise.
/// The receiver pose is frozen at `t_s` for the duration of the packet.
pub fn synthesize_trace(
    scenario: &ScenarioConfig,
    agent: &RobotAgent,
    identity: &IdentityId,
    t_s: f64,
    rng_seed: u64,
) -> Result<ReceivedTrace> {
    let alpha = agent.power_scale_of(identity)?;
    let layout = scenario.tags.layout()?;
    let rx = scenario.receiver.position_at(t_s)?;
    let tx = agent.trajectory.position_at(t_s)?;
    let tx_power = alpha * agent.tx_power_w;

    let injected = layout
        .tag_positions
        .iter()
        .map(|tag| {
            let d_t = tx.distance(rx + *tag);
            reflected_power(&scenario.channel, tx_power, d_t, tag.norm())
        })
        .collect::<Result<Vec<f64>>>()?;

    let tl = &scenario.trace;
    let k = layout.len();
    let block_len = tl.block_len();
    let total = tl.trace_len(k);
    let strongest = injected.iter().cloned().fold(0.0, f64::max);
    let noise_std = scenario.noise.std_for(strongest);
    let noise = if noise_std > 0.0 {
        Some(Normal::new(0.0, noise_std).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    let mut samples = Vec::with_capacity(total);
    let mut schedule = Vec::with_capacity(total);
    for n in 0..total {
        let mut value = scenario.ambient_level;
        let slot = n
            .checked_sub(tl.guard_prefix)
            .filter(|&off| off < block_len * k);
        match slot {
            Some(off) => {
                let tag = off / block_len;
                let bit = tl.code.bits()[(off % block_len) / tl.samples_per_bit];
                if bit == 1 {
                    value += injected[tag];
                }
                schedule.push((tag + 1) as u16);
            }
            None => schedule.push(0),
        }
        if let Some(dist) = &noise {
            value += dist.sample(&mut rng);
        }
        samples.push(value.max(0.0));
    }

    Ok(ReceivedTrace {
        identity: identity.clone(),
        t_s,
        sample_rate_hz: tl.sample_rate_hz,
        samples,
        tag_schedule: schedule,
        tag_code: tl.code.clone(),
        samples_per_bit: tl.samples_per_bit,
        num_tags: k,
        backscatter_start: tl.guard_prefix,
        injected_powers: injected,
        noise_std,
    })
}
