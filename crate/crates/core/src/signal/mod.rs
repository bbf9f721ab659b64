//! From received traces to multipath signatures and signal profiles.

pub mod correlation;
pub mod profile;
pub mod segment;
pub mod signature;
pub mod smoothing;

pub use correlation::correlate;
pub use profile::{build_profile, ProfileBuilder, SignalProfile, SignatureView};
pub use segment::{segment_backscatter, SegmentBounds, DEFAULT_SMOOTHING_WINDOW};
pub use signature::{build_signature, extract_reflection, MultipathSignature};
pub use smoothing::moving_average;

use crate::error::Result;
use crate::sim::ReceivedTrace;

/// Segments a trace and extracts its signature.
pub fn process_trace(trace: &ReceivedTrace, window: usize) -> Result<MultipathSignature> {
    let bounds = segment_backscatter(trace, window)?;
    build_signature(trace, &bounds)
}
