use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Link constants that do not depend on transmit power or geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelParams {
    pub wavelength_m: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub tag_gain: f64,
    pub reflection_coeff: f64,
    /// Lumped tag transfer factor covering wavelength, tag gain and reflection coefficient.
    pub tag_transfer: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            // 2.4 GHz ISM band
            wavelength_m: 0.125,
            tx_gain: 1.0,
            rx_gain: 1.0,
            tag_gain: 1.0,
            reflection_coeff: 1.0,
            tag_transfer: 0.05,
        }
    }
}

impl ChannelParams {
    /// `tag_transfer` may be zero to model tags that never reflect.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength_m", self.wavelength_m),
            ("tx_gain", self.tx_gain),
            ("rx_gain", self.rx_gain),
            ("tag_gain", self.tag_gain),
            ("reflection_coeff", self.reflection_coeff),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.reflection_coeff > 1.0 {
            return Err(Error::Config("reflection_coeff must be <= 1".into()));
        }
        if !(self.tag_transfer >= 0.0) || !self.tag_transfer.is_finite() {
            return Err(Error::Config("tag_transfer must be non-negative".into()));
        }
        Ok(())
    }
}

/// Power reflected by one tag and seen at the receiver (free-space backscatter link).
///
/// The transmitter-to-tag leg and the tag-to-receiver leg each follow an
/// inverse-square law; the tag itself contributes the lumped `tag_transfer`.
pub fn reflected_power(
    channel: &ChannelParams,
    tx_power_w: f64,
    d_t_m: f64,
    d_r_m: f64,
) -> Result<f64> {
    if !(d_t_m > 0.0) || !(d_r_m > 0.0) {
        return Err(Error::Domain(format!(
            "distances must be positive (d_t = {d_t_m}, d_r = {d_r_m})"
        )));
    }
    if !(tx_power_w > 0.0) {
        return Err(Error::Domain(format!(
            "transmit power must be positive, got {tx_power_w}"
        )));
    }
    let incident = tx_power_w * channel.tx_gain / (4.0 * PI * d_t_m * d_t_m);
    let lambda2 = channel.wavelength_m * channel.wavelength_m;
    let returned = lambda2 * channel.rx_gain / (16.0 * PI * PI * d_r_m * d_r_m);
    Ok(incident * returned * channel.tag_transfer)
}
