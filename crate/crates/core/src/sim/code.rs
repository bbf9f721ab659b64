use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Known on/off pattern every tag backscatters during its slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TagCode(pub Vec<u8>);

impl TagCode {
    /// 64-bit code: the 63-chip maximal-length sequence of x^6 + x^5 + 1
    /// followed by one zero, so ones and zeros are equally frequent.
    pub fn default_code() -> Self {
        let mut state: u8 = 0b00_0001;
        let mut bits = Vec::with_capacity(64);
        for _ in 0..63 {
            let out = state & 1;
            bits.push(out);
            let feedback = ((state >> 5) ^ (state >> 4)) & 1;
            state = ((state << 1) | feedback) & 0b11_1111;
        }
        bits.push(0);
        TagCode(bits)
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Parameter("tag code is empty".into()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parameter("tag code must be binary".into()));
        }
        if !bits.contains(&1) || !bits.contains(&0) {
            return Err(Error::Parameter(
                "tag code needs both reflecting and non-reflecting bits".into(),
            ));
        }
        Ok(TagCode(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Sample-domain 0/1 mask: every bit held for `samples_per_bit` samples,
    /// repeated once per tag slot.
    pub fn expand(&self, samples_per_bit: usize, repeats: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len() * samples_per_bit * repeats);
        for _ in 0..repeats {
            for &b in &self.0 {
                out.extend(std::iter::repeat_n(b, samples_per_bit));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_code_is_balanced() {
        let code = TagCode::default_code();
        assert_eq!(code.len(), 64);
        let ones = code.bits().iter().filter(|&&b| b == 1).count();
        assert_eq!(ones, 32);
    }

    #[test]
    fn default_code_has_sharp_autocorrelation() {
        let code = TagCode::default_code();
        let bits = code.bits();
        let full: usize = bits.iter().map(|&b| b as usize).sum();
        for shift in 1..bits.len() {
            let overlap: usize = (0..bits.len() - shift)
                .map(|m| (bits[m] & bits[m + shift]) as usize)
                .sum();
            assert!(overlap <= full / 2 + 1, "shift {shift}: {overlap}");
        }
    }

    #[test]
    fn expansion_length() {
        let code = TagCode::default_code();
        let e = code.expand(8, 4);
        assert_eq!(e.len(), 64 * 8 * 4);
        assert_eq!(&e[..8], &[code.bits()[0]; 8]);
    }

    #[test]
    fn rejects_constant_codes() {
        assert!(TagCode::from_bits(vec![1, 1, 1]).is_err());
        assert!(TagCode::from_bits(vec![0, 2]).is_err());
    }
}
