use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::agent::{IdentityId, SourceId};
use super::config::ScenarioConfig;
use super::trace::{synthesize_trace, ReceivedTrace};
use crate::error::Result;
use crate::seed::derive_seed;

/// All traces of one claimed identity, one per update period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityTraces {
    pub identity: IdentityId,
    pub source: SourceId,
    pub traces: Vec<ReceivedTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTraces {
    pub seed: u64,
    pub period_s: f64,
    pub per_identity: Vec<IdentityTraces>,
}

impl ScenarioTraces {
    /// Ground truth: identity to physical source.
    pub fn labels(&self) -> BTreeMap<IdentityId, SourceId> {
        self.per_identity
            .iter()
            .map(|it| (it.identity.clone(), it.source.clone()))
            .collect()
    }
}

/// Runs the whole scenario: one trace per claimed identity per update period.
pub fn simulate_scenario(scenario: &ScenarioConfig, rng_seed: u64) -> Result<ScenarioTraces> {
    scenario.validate()?;
    let periods = scenario.periods();
    let mut per_identity = Vec::new();
    for (ordinal, (agent, identity)) in scenario.identities().enumerate() {
        let traces = (0..periods)
            .map(|p| {
                let t = p as f64 * scenario.period_s;
                let seed = derive_seed(rng_seed, &[ordinal as u64, p as u64]);
                synthesize_trace(scenario, agent, identity, t, seed)
            })
            .collect::<Result<Vec<_>>>()?;
        per_identity.push(IdentityTraces {
            identity: identity.clone(),
            source: agent.source.clone(),
            traces,
        });
    }
    Ok(ScenarioTraces {
        seed: rng_seed,
        period_s: scenario.period_s,
        per_identity,
    })
}
