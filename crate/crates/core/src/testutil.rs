//! Small fixed scenarios shared by unit tests.

use crate::sim::{
    synthesize_trace, IdentityId, NoiseModel, Point2, ReceivedTrace, RobotAgent, ScenarioConfig,
    TagConfig, Trajectory,
};
use std::collections::BTreeMap;

/// Receiver parked near the origin, attacker `mallory` (identities m1, m2)
/// and legitimate `alice` walking straight lines past it.
pub fn line_scenario(noise: NoiseModel) -> ScenarioConfig {
    let receiver = Trajectory::through(
        &[Point2::new(0.0, 0.0), Point2::new(0.5, 0.0)],
        0.05,
        0.0,
    )
    .unwrap();
    let mallory = RobotAgent {
        source: "mallory".into(),
        identities: vec!["m1".into(), "m2".into()],
        power_scale: BTreeMap::new(),
        tx_power_w: 0.01,
        trajectory: Trajectory::through(
            &[Point2::new(-2.0, 1.5), Point2::new(2.0, 1.5)],
            0.2,
            0.0,
        )
        .unwrap(),
    };
    let alice = RobotAgent::legitimate(
        "alice",
        0.01,
        Trajectory::through(&[Point2::new(1.0, -2.5), Point2::new(-1.0, 0.5)], 0.2, 0.0)
            .unwrap(),
    );
    ScenarioConfig {
        name: "line".into(),
        horizon_s: 6.0,
        period_s: 0.6,
        seed: 1,
        ambient_level: 1e-6,
        noise,
        channel: Default::default(),
        tags: TagConfig::default(),
        trace: Default::default(),
        receiver,
        agents: vec![mallory, alice],
    }
}

pub fn synthesize(sc: &ScenarioConfig, identity: &str, t_s: f64, seed: u64) -> ReceivedTrace {
    let id = IdentityId::from(identity);
    let agent = sc.agent_of(&id).unwrap();
    synthesize_trace(sc, agent, &id, t_s, seed).unwrap()
}
