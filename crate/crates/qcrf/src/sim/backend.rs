//! The sampled quantum estimator as a training back-end.

use super::estimate::{estimate_gradient, EstimatorSettings};
use crate::crf::{Dataset, GradientBackend, Weights};
use crate::error::{QcrfError, Result};
use crate::seeding::derive_seed;

/// Drives gradient descent with [`estimate_gradient`]; each iteration
/// derives a fresh sampling seed from the base seed.
#[derive(Debug)]
pub struct QuantumBackend {
    pub settings: EstimatorSettings,
    pub m: u64,
    pub seed: u64,
    iteration: u64,
}

impl QuantumBackend {
    pub fn new(settings: EstimatorSettings, m: u64, seed: u64) -> Self {
        Self {
            settings,
            m,
            seed,
            iteration: 0,
        }
    }
}

impl GradientBackend for QuantumBackend {
    fn gradient(&mut self, ds: &Dataset, w: &Weights) -> Result<Vec<f64>> {
        let seed = derive_seed(self.seed, &[self.iteration]);
        self.iteration += 1;
        let estimate = estimate_gradient(ds, w, self.settings, self.m, seed)?;
        if estimate.degenerate {
            return Err(QcrfError::InvalidInstance(format!(
                "quantum gradient is degenerate at m = {}: a denominator trace measured zero",
                self.m
            )));
        }
        Ok(estimate.gradient)
    }

    fn name(&self) -> &str {
        "quantum"
    }
}
