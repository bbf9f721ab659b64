use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use crate::error::{Error, Result};

/// Network identity a robot claims in its packets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IdentityId(pub String);

/// The physical transmitter behind one or more identities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceId(pub String);

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for IdentityId {
    fn from(s: &str) -> Self {
        IdentityId(s.to_owned())
    }
}

impl From<&str> for SourceId {
    fn from(s: &str) -> Self {
        SourceId(s.to_owned())
    }
}

/// A transmitting robot. Legitimate robots claim one identity; Sybil
/// attackers claim several, optionally with a per-identity power scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotAgent {
    pub source: SourceId,
    pub identities: Vec<IdentityId>,
    /// Transmit power scale per identity; identities missing here use 1.
    #[serde(default)]
    pub power_scale: BTreeMap<IdentityId, f64>,
    pub tx_power_w: f64,
    pub trajectory: Trajectory,
}

impl RobotAgent {
    pub fn legitimate(source: &str, tx_power_w: f64, trajectory: Trajectory) -> Self {
        Self {
            source: source.into(),
            identities: vec![source.into()],
            power_scale: BTreeMap::new(),
            tx_power_w,
            trajectory,
        }
    }

    pub fn is_attacker(&self) -> bool {
        self.identities.len() > 1
    }

    pub fn claims(&self, identity: &IdentityId) -> bool {
        self.identities.contains(identity)
    }

    pub fn power_scale_of(&self, identity: &IdentityId) -> Result<f64> {
        if !self.claims(identity) {
            return Err(Error::UnknownIdentity(identity.0.clone()));
        }
        Ok(self.power_scale.get(identity).copied().unwrap_or(1.0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.identities.is_empty() {
            return Err(Error::Config(format!("agent {} claims no identity", self.source)));
        }
        if !(self.tx_power_w > 0.0) {
            return Err(Error::Config(format!(
                "agent {} needs a positive transmit power",
                self.source
            )));
        }
        for (id, alpha) in &self.power_scale {
            if !self.claims(id) {
                return Err(Error::Config(format!(
                    "agent {} scales unclaimed identity {id}",
                    self.source
                )));
            }
            if !(*alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::Config(format!("power scale for {id} must be positive")));
            }
            if !self.is_attacker() && *alpha != 1.0 {
                return Err(Error::Config(format!(
                    "legitimate agent {} must transmit at scale 1",
                    self.source
                )));
            }
        }
        self.trajectory.validate()
    }
}
