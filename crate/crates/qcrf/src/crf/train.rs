//! Gradient-descent training loop.

use super::gradient::GradientBackend;
use super::prob::nll;
use super::types::{Dataset, Weights};
use crate::error::{QcrfError, Result};

/// One row of a training trajectory. `nll` and `grad_norm` are evaluated
/// at the pre-update weights; `weights` holds the post-update vector.
#[derive(Debug, Clone)]
pub struct TrainStep {
    pub iteration: usize,
    pub weights: Vec<f64>,
    pub nll: f64,
    pub grad_norm: f64,
}

/// Run `iters` gradient-descent updates w ← w − η ∂L/∂w with the given
/// back-end, recording one [`TrainStep`] per iteration.
///
/// Aborts with [`QcrfError::TrainingDiverged`] if the nll increases for
/// 10 consecutive iterations.
pub fn train(
    ds: &Dataset,
    w0: &Weights,
    backend: &mut dyn GradientBackend,
    iters: usize,
) -> Result<Vec<TrainStep>> {
    if iters == 0 {
        return Err(QcrfError::InvalidInstance(
            "training needs at least one iteration".into(),
        ));
    }
    let mut w = w0.clone();
    let mut trajectory = Vec::with_capacity(iters);
    let mut last_nll = f64::INFINITY;
    let mut rising = 0usize;
    for iteration in 1..=iters {
        let value = nll(ds, &w)?;
        if value > last_nll {
            rising += 1;
            if rising >= 10 {
                return Err(QcrfError::TrainingDiverged {
                    iteration,
                    consecutive: rising,
                    nll: value,
                });
            }
        } else {
            rising = 0;
        }
        last_nll = value;

        let gradient = backend.gradient(ds, &w)?;
        let grad_norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        w = w.step(&gradient)?;
        trajectory.push(TrainStep {
            iteration,
            weights: w.values().to_vec(),
            nll: value,
            grad_norm,
        });
    }
    Ok(trajectory)
}
