//! Fixed-point register arithmetic: 8 integer bits, `r` fractional bits,
//! round-to-nearest with ties to even, explicit saturation detection.

use crate::error::{QcrfError, Result};

/// Integer bits of the fixed-point format (magnitude < 2^8).
pub const INT_BITS: u32 = 8;

/// Codec for (8 + r)-bit fixed-point register values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointCodec {
    r: u32,
}

impl FixedPointCodec {
    pub fn new(r: u32) -> Self {
        Self { r }
    }

    pub fn fractional_bits(&self) -> u32 {
        self.r
    }

    /// Largest representable magnitude, 2^8 − 2^−r.
    pub fn max_value(&self) -> f64 {
        self.max_code() as f64 / self.scale()
    }

    fn max_code(&self) -> i64 {
        (1i64 << (INT_BITS + self.r)) - 1
    }

    fn scale(&self) -> f64 {
        (1u64 << self.r) as f64
    }

    /// Encode a real value onto the 2^−r grid, ties to even. `branch`
    /// names the register branch in the saturation error.
    pub fn encode(&self, value: f64, branch: u64) -> Result<i64> {
        let scaled = (value * self.scale()).round_ties_even();
        if !scaled.is_finite() || scaled.abs() > self.max_code() as f64 {
            return Err(QcrfError::FixedPointSaturation { branch, value });
        }
        Ok(scaled as i64)
    }

    pub fn decode(&self, code: i64) -> f64 {
        code as f64 / self.scale()
    }

    /// Exact grid product of two codes: the 2^−2r-scale integer product
    /// rounded back to the 2^−r grid with ties to even.
    pub fn multiply(&self, a: i64, b: i64, branch: u64) -> Result<i64> {
        let wide = i128::from(a) * i128::from(b);
        let code = round_shift_ties_even(wide, self.r);
        if code.unsigned_abs() > self.max_code() as u128 {
            return Err(QcrfError::FixedPointSaturation {
                branch,
                value: code as f64 / self.scale() / self.scale() * self.scale(),
            });
        }
        Ok(code as i64)
    }

    /// Half a grid step; the worst-case rounding error of one encode.
    pub fn half_step(&self) -> f64 {
        0.5 / self.scale()
    }
}

/// value / 2^shift, rounded to nearest with ties to even. The remainder
/// is taken nonnegative so the rule is uniform across signs.
fn round_shift_ties_even(value: i128, shift: u32) -> i128 {
    if shift == 0 {
        return value;
    }
    let half = 1i128 << (shift - 1);
    let mask = (1i128 << shift) - 1;
    let floor = value >> shift;
    let remainder = value & mask;
    if remainder > half {
        floor + 1
    } else if remainder < half {
        floor
    } else if floor & 1 == 0 {
        floor
    } else {
        floor + 1
    }
}
