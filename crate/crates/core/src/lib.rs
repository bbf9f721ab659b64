//! Sybil detection for multi-robot networks from backscatter-tag multipath
//! signatures.
//!
//! A receiving robot carries a ring of batteryless backscatter tags. Every
//! packet it receives is partly reflected by the tags in turn; the reflected
//! power per tag forms a signature of where the transmitter is. Identities
//! forged by one transmitter share a trajectory, so their signature
//! sequences stay close while different robots drift apart.
//!
//! * [`sim`] synthesizes received traces for moving robots and attackers.
//! * [`signal`] segments traces and turns them into normalized signatures and profiles.
//! * [`distance`] compares profiles row by row.
//! * [`detector`] learns a logistic similarity model and flags Sybil pairs.
//! * [`eval`] builds datasets, cross-validates and runs the experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detector;
pub mod distance;
pub mod error;
pub mod eval;
pub mod io;
pub mod seed;
pub mod signal;
pub mod sim;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
