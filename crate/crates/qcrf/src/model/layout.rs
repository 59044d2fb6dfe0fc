//! Composite register layouts and basis-index decomposition.

use crate::error::{QcrfError, Result};

/// Whether the register carries label digits alongside the feature bits.
///
/// Clamped mode spans the 2^(nK) feature-sign configurations; free mode
/// adjoins one label digit per position, spanning Q^n · 2^(nK) states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterMode {
    Clamped,
    Free,
}

/// Shape of the composite register a diagonal operator acts on.
///
/// A basis index decomposes as `index = label_value · 2^(nK) + feature_bits`.
/// The label value is a base-Q number with the digit of position 0 most
/// significant; feature bit (k, i) occupies slot i·K + k counted from the
/// most significant feature bit. For alphabets whose size is not a power
/// of two the label digits are enumerated in base Q directly, so invalid
/// encodings never appear in any basis iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    n: usize,
    k: usize,
    q: usize,
    mode: RegisterMode,
}

impl RegisterLayout {
    pub fn new(n: usize, k: usize, q: usize, mode: RegisterMode) -> Result<Self> {
        if n == 0 || k == 0 || q == 0 {
            return Err(QcrfError::InvalidInstance(format!(
                "register layout dimensions must be positive (n={n}, K={k}, Q={q})"
            )));
        }
        let layout = Self { n, k, q, mode };
        if layout.dim_u128() > 1 << 62 {
            return Err(QcrfError::InvalidInstance(format!(
                "register dimension {} exceeds the addressable range",
                layout.dim_u128()
            )));
        }
        Ok(layout)
    }

    pub fn clamped(n: usize, k: usize, q: usize) -> Result<Self> {
        Self::new(n, k, q, RegisterMode::Clamped)
    }

    pub fn free(n: usize, k: usize, q: usize) -> Result<Self> {
        Self::new(n, k, q, RegisterMode::Free)
    }

    pub fn positions(&self) -> usize {
        self.n
    }

    pub fn feature_count(&self) -> usize {
        self.k
    }

    pub fn label_count(&self) -> usize {
        self.q
    }

    pub fn mode(&self) -> RegisterMode {
        self.mode
    }

    /// Number of feature-sign bits, nK.
    pub fn feature_bits(&self) -> usize {
        self.n * self.k
    }

    /// Bits per label register, ceil(log2 Q).
    pub fn label_bits(&self) -> usize {
        usize::BITS as usize - self.q.next_power_of_two().leading_zeros() as usize - 1
    }

    /// Qubit count of the physical register, n·(log Q + K) in free mode.
    pub fn qubit_count(&self) -> usize {
        match self.mode {
            RegisterMode::Clamped => self.feature_bits(),
            RegisterMode::Free => self.n * (self.label_bits() + self.k),
        }
    }

    fn dim_u128(&self) -> u128 {
        let feature = 1u128 << self.feature_bits();
        match self.mode {
            RegisterMode::Clamped => feature,
            RegisterMode::Free => (self.q as u128).pow(self.n as u32) * feature,
        }
    }

    /// Basis dimension D.
    pub fn dim(&self) -> u64 {
        self.dim_u128() as u64
    }

    /// Number of distinct labelings, Q^n.
    pub fn labelings(&self) -> u64 {
        (self.q as u64).pow(self.n as u32)
    }

    /// The feature-sign part of a basis index.
    #[inline]
    pub fn feature_part(&self, index: u64) -> u64 {
        index & ((1u64 << self.feature_bits()) - 1)
    }

    /// The label part (a base-Q value) of a basis index; 0 in clamped mode.
    #[inline]
    pub fn label_part(&self, index: u64) -> u64 {
        index >> self.feature_bits()
    }

    /// Feature bit b_{k,i} of a basis index.
    #[inline]
    pub fn feature_bit(&self, index: u64, k: usize, i: usize) -> u8 {
        debug_assert!(k < self.k && i < self.n);
        let slot = i * self.k + k;
        ((index >> (self.feature_bits() - 1 - slot)) & 1) as u8
    }

    /// Label digit j_i of a basis index (free mode).
    #[inline]
    pub fn label_at(&self, index: u64, i: usize) -> usize {
        debug_assert!(i < self.n);
        let mut value = self.label_part(index);
        let mut divisor = 1u64;
        for _ in i + 1..self.n {
            divisor *= self.q as u64;
        }
        value /= divisor;
        (value % self.q as u64) as usize
    }

    /// Compose a basis index from label digits and a feature-bit word.
    pub fn index_from_parts(&self, labels: &[usize], feature_bits: u64) -> u64 {
        debug_assert!(feature_bits < 1u64 << self.feature_bits());
        let mut label_value = 0u64;
        if self.mode == RegisterMode::Free {
            debug_assert_eq!(labels.len(), self.n);
            for &j in labels {
                debug_assert!(j < self.q);
                label_value = label_value * self.q as u64 + j as u64;
            }
        }
        (label_value << self.feature_bits()) | feature_bits
    }

    /// Decode a labeling ordinal in 0..Q^n into label digits.
    pub fn decode_labeling(&self, ordinal: u64) -> Vec<usize> {
        let mut digits = vec![0usize; self.n];
        let mut rest = ordinal;
        for i in (0..self.n).rev() {
            digits[i] = (rest % self.q as u64) as usize;
            rest /= self.q as u64;
        }
        digits
    }

    /// The bit a projector pins for feature sign `f`: (1 − f)/2.
    #[inline]
    pub fn pinned_bit(sign: i8) -> u8 {
        if sign > 0 {
            0
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_bits() {
        let c = RegisterLayout::clamped(2, 5, 2).unwrap();
        assert_eq!(c.dim(), 1024);
        assert_eq!(c.qubit_count(), 10);
        let f = RegisterLayout::free(2, 5, 2).unwrap();
        assert_eq!(f.dim(), 4096);
        assert_eq!(f.qubit_count(), 12);
        assert_eq!(f.label_bits(), 1);
        assert_eq!(RegisterLayout::free(1, 1, 3).unwrap().label_bits(), 2);
        assert_eq!(RegisterLayout::free(1, 1, 1).unwrap().label_bits(), 0);
    }

    #[test]
    fn index_decomposition_round_trips() {
        let layout = RegisterLayout::free(2, 2, 3).unwrap();
        for ordinal in 0..layout.labelings() {
            let labels = layout.decode_labeling(ordinal);
            for bits in 0..(1u64 << layout.feature_bits()) {
                let index = layout.index_from_parts(&labels, bits);
                assert_eq!(layout.feature_part(index), bits);
                for (i, &j) in labels.iter().enumerate() {
                    assert_eq!(layout.label_at(index, i), j);
                }
            }
        }
    }

    #[test]
    fn feature_bit_slots_are_position_major() {
        // Slot order: (k=0,i=0) is the most significant feature bit.
        let layout = RegisterLayout::clamped(2, 2, 2).unwrap();
        let index = 0b1000u64;
        assert_eq!(layout.feature_bit(index, 0, 0), 1);
        assert_eq!(layout.feature_bit(index, 1, 0), 0);
        assert_eq!(layout.feature_bit(index, 0, 1), 0);
        assert_eq!(layout.feature_bit(index, 1, 1), 0);
    }
}
