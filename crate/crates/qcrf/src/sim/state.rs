//! Sparse register state over (main, reg2, reg3, ancilla) branches.

use crate::error::{QcrfError, Result};
use crate::model::RegisterLayout;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// One computational-basis branch of the composite register.
///
/// `main` indexes the model register; `reg2` and `reg3` are the two
/// precision registers (phase codes while estimating, fixed-point codes
/// after the arithmetic gates); `ancilla` is the rotation target qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BranchKey {
    pub main: u64,
    pub reg2: i64,
    pub reg3: i64,
    pub ancilla: u8,
}

impl BranchKey {
    pub fn main(main: u64) -> Self {
        Self {
            main,
            reg2: 0,
            reg3: 0,
            ancilla: 0,
        }
    }
}

/// A sparse amplitude map over reachable branches, kept in key order so
/// every reduction is performed in a fixed order.
#[derive(Debug, Clone)]
pub struct RegisterState {
    layout: RegisterLayout,
    branches: BTreeMap<BranchKey, Complex64>,
}

impl RegisterState {
    pub fn new(layout: RegisterLayout) -> Self {
        Self {
            layout,
            branches: BTreeMap::new(),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn amplitude(&self, key: &BranchKey) -> Complex64 {
        self.branches
            .get(key)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set_amplitude(&mut self, key: BranchKey, amplitude: Complex64) {
        if amplitude.norm_sqr() == 0.0 {
            self.branches.remove(&key);
        } else {
            self.branches.insert(key, amplitude);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BranchKey, &Complex64)> {
        self.branches.iter()
    }

    /// Squared ℓ2 norm, accumulated in key order.
    pub fn norm_sqr(&self) -> f64 {
        self.branches.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Apply a branchwise key permutation. The map must be injective on
    /// the present branches; a collision means the requested operation is
    /// not reversible and is rejected.
    pub fn permute_branches(
        &mut self,
        mut map: impl FnMut(&BranchKey) -> Result<BranchKey>,
    ) -> Result<()> {
        let mut next = BTreeMap::new();
        for (key, amplitude) in &self.branches {
            let new_key = map(key)?;
            if next.insert(new_key, *amplitude).is_some() {
                return Err(QcrfError::InvalidInstance(format!(
                    "register arithmetic is not injective: branches collide at main index {}",
                    new_key.main
                )));
            }
        }
        self.branches = next;
        Ok(())
    }

    /// Replace the contents with the given branches.
    pub fn replace_branches(&mut self, branches: BTreeMap<BranchKey, Complex64>) {
        self.branches = branches;
    }
}
