//! Sign decomposition of diagonal factors.
//!
//! The controlled rotation encodes amplitudes q = C√λ, which requires
//! λ ≥ 0, while the derivative factors µ take values in {−n, …, +n}.
//! Splitting µ = µ⁺ − µ⁻ into two nonnegative diagonals lets the
//! unchanged circuit run on each part; the estimator subtracts the two
//! results.

use crate::model::DiagonalOperator;

/// A diagonal operator split into nonnegative positive and negative
/// parts: original = positive − negative, min(positive, negative) = 0
/// pointwise.
#[derive(Debug, Clone)]
pub struct SignSplit {
    pub positive: DiagonalOperator,
    pub negative: DiagonalOperator,
}

impl SignSplit {
    pub fn of(op: &DiagonalOperator) -> Self {
        Self {
            positive: op.positive_part(),
            negative: op.negative_part(),
        }
    }
}
