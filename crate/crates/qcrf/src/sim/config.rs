//! Precision configuration: register width, eigenvalue-to-phase windows
//! and the rotation constant.

use super::fixed::FixedPointCodec;
use crate::crf::Weights;
use crate::error::{QcrfError, Result};
use crate::model::RegisterLayout;

/// Affine window mapping an eigenvalue range onto phase codes in [0, 1).
///
/// `encode` maps [lo, hi] onto the integer codes 0..2^r−2. The level
/// count is even, so the midpoint of a symmetric window — eigenvalue 0 —
/// sits exactly on the code grid and round-trips with no error; that is
/// what makes a zero derivative factor produce λ = 0 exactly. A decoded
/// eigenvalue differs from the true one by at most
/// (hi − lo) / (2^r − 2) / 2, i.e. range · 2^−(r+1) plus the affine
/// rounding slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseWindow {
    lo: f64,
    hi: f64,
}

impl PhaseWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Symmetric window [−bound, +bound].
    pub fn symmetric(bound: f64) -> Self {
        Self {
            lo: -bound,
            hi: bound,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    fn levels(r: u32) -> f64 {
        ((1u64 << r) - 2) as f64
    }

    pub fn encode(&self, value: f64, r: u32) -> i64 {
        if self.hi <= self.lo {
            return 0;
        }
        let t = (value - self.lo) / (self.hi - self.lo) * Self::levels(r);
        t.round_ties_even().clamp(0.0, Self::levels(r)) as i64
    }

    pub fn decode(&self, code: i64, r: u32) -> f64 {
        if self.hi <= self.lo {
            return self.lo;
        }
        self.lo + code as f64 / Self::levels(r) * (self.hi - self.lo)
    }

    /// Worst-case decode error for in-window values.
    pub fn quantization_bound(&self, r: u32) -> f64 {
        if self.hi <= self.lo {
            0.0
        } else {
            (self.hi - self.lo) / Self::levels(r) * 0.5
        }
    }
}

/// Precision parameters of one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionConfig {
    r: u32,
    h_window: PhaseWindow,
    factor_window: PhaseWindow,
    c: Option<f64>,
    epsilon: f64,
}

impl PrecisionConfig {
    pub const MIN_R: u32 = 4;
    pub const MAX_R: u32 = 24;

    /// Windows sized for an n-position model: the Hamiltonian spectrum
    /// lies in ±n Σ|w_k| and every derivative factor in ±n.
    pub fn for_model(n: usize, w: &Weights, r: u32, epsilon: f64) -> Result<Self> {
        if !(Self::MIN_R..=Self::MAX_R).contains(&r) {
            return Err(QcrfError::InvalidInstance(format!(
                "precision r must lie in [{}, {}], got {r}",
                Self::MIN_R,
                Self::MAX_R
            )));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(QcrfError::InvalidInstance(format!(
                "epsilon must lie in [0, 1), got {epsilon}"
            )));
        }
        Ok(Self {
            r,
            h_window: PhaseWindow::symmetric(n as f64 * w.abs_sum()),
            factor_window: PhaseWindow::symmetric(n as f64),
            c: None,
            epsilon,
        })
    }

    /// Pin the rotation constant instead of deriving it per pass.
    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn c_override(&self) -> Option<f64> {
        self.c
    }

    pub fn h_window(&self) -> PhaseWindow {
        self.h_window
    }

    pub fn factor_window(&self) -> PhaseWindow {
        self.factor_window
    }

    pub fn codec(&self) -> FixedPointCodec {
        FixedPointCodec::new(self.r)
    }

    /// The reference rotation constant
    /// C = sqrt(D (1 − ε) / (D − nK · max|w_k|)).
    ///
    /// Valid only when every |λ_k| stays at or below 1/C²; the rotation
    /// rejects larger values instead of producing amplitudes above 1.
    pub fn reference_c(layout: &RegisterLayout, w: &Weights, epsilon: f64) -> f64 {
        let d = layout.dim() as f64;
        let nk = layout.feature_bits() as f64;
        (d * (1.0 - epsilon) / (d - nk * w.max_abs())).sqrt()
    }
}
