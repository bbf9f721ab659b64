//! Backscatter channel, robot motion and received-trace synthesis.

pub mod agent;
pub mod channel;
pub mod code;
pub mod config;
pub mod corpus;
pub mod geometry;
pub mod scenario;
pub mod trace;
pub mod trajectory;

pub use agent::{IdentityId, RobotAgent, SourceId};
pub use channel::{reflected_power, ChannelParams};
pub use code::TagCode;
pub use config::{NoiseModel, ScenarioConfig, TagConfig, TraceLayout};
pub use corpus::CorpusConfig;
pub use geometry::{Point2, TagLayout};
pub use scenario::{simulate_scenario, IdentityTraces, ScenarioTraces};
pub use trace::{synthesize_trace, ReceivedTrace};
pub use trajectory::{Trajectory, Waypoint};
