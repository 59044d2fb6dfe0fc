//! Construction of the QCRF operators.

use super::layout::{RegisterLayout, RegisterMode};
use super::operator::{DiagonalOperator, Projector};
use crate::crf::{FeatureTable, Weights};
use crate::error::{QcrfError, Result};
use std::sync::Arc;

/// Pauli-Z analogue acting on feature slot (k, i): the diagonal entry at
/// basis index b is (−1)^(b_{k,i}); label registers act as identity.
pub fn sigma_z(layout: RegisterLayout, k: usize, i: usize) -> Result<DiagonalOperator> {
    if k >= layout.feature_count() {
        return Err(QcrfError::IndexOutOfRange {
            what: "feature index",
            index: k,
            limit: layout.feature_count(),
        });
    }
    if i >= layout.positions() {
        return Err(QcrfError::IndexOutOfRange {
            what: "position index",
            index: i,
            limit: layout.positions(),
        });
    }
    Ok(DiagonalOperator::new(layout, 1.0, move |index| {
        if layout.feature_bit(index, k, i) == 0 {
            1.0
        } else {
            -1.0
        }
    }))
}

/// The weighted sum Σ_{i,k} w_k σ_{k,i}: H⁽⁰⁾ on a clamped layout, H⁽ⁿ⁾
/// on a free layout. Entries span [−n Σ|w_k|, +n Σ|w_k|], with the
/// maximum attained at index 0.
pub fn build_h(layout: RegisterLayout, w: &Weights) -> Result<DiagonalOperator> {
    if w.len() != layout.feature_count() {
        return Err(QcrfError::DimensionMismatch {
            what: "weights vs register layout",
            expected: layout.feature_count(),
            actual: w.len(),
        });
    }
    let weights = w.values().to_vec();
    let bound = layout.positions() as f64 * w.abs_sum();
    Ok(DiagonalOperator::new(layout, bound, move |index| {
        let mut total = 0.0;
        for i in 0..layout.positions() {
            for (k, wk) in weights.iter().enumerate() {
                total += if layout.feature_bit(index, k, i) == 0 {
                    *wk
                } else {
                    -*wk
                };
            }
        }
        total
    }))
}

/// ∂H/∂w_k = Σ_i σ_{k,i}: the per-feature sign sum, with entries in
/// {−n, …, +n}.
pub fn dh_dw(layout: RegisterLayout, k: usize) -> Result<DiagonalOperator> {
    if k >= layout.feature_count() {
        return Err(QcrfError::IndexOutOfRange {
            what: "feature index",
            index: k,
            limit: layout.feature_count(),
        });
    }
    let bound = layout.positions() as f64;
    Ok(DiagonalOperator::new(layout, bound, move |index| {
        let mut total = 0.0;
        for i in 0..layout.positions() {
            total += if layout.feature_bit(index, k, i) == 0 {
                1.0
            } else {
                -1.0
            };
        }
        total
    }))
}

fn check_labels(table: &FeatureTable, labels: &[usize]) -> Result<()> {
    if labels.len() != table.positions() {
        return Err(QcrfError::DimensionMismatch {
            what: "labels vs feature table",
            expected: table.positions(),
            actual: labels.len(),
        });
    }
    for &j in labels {
        if j >= table.label_count() {
            return Err(QcrfError::LabelOutOfRange {
                label: j,
                q: table.label_count(),
            });
        }
    }
    Ok(())
}

/// Feature-bit word pinned by a labeling: bit (k, i) = (1 − f_k(x_i, y_i))/2.
fn pinned_feature_bits(layout: &RegisterLayout, table: &FeatureTable, labels: &[usize]) -> u64 {
    let mut bits = 0u64;
    for i in 0..layout.positions() {
        for k in 0..layout.feature_count() {
            if RegisterLayout::pinned_bit(table.sign(k, i, labels[i])) == 1 {
                let slot = i * layout.feature_count() + k;
                bits |= 1u64 << (layout.feature_bits() - 1 - slot);
            }
        }
    }
    bits
}

/// Rank-1 projector onto the single clamped-mode basis state whose
/// feature bits agree with the training labeling.
pub fn build_lambda_xy(
    layout: RegisterLayout,
    table: &FeatureTable,
    labels: &[usize],
) -> Result<Projector> {
    if layout.mode() != RegisterMode::Clamped {
        return Err(QcrfError::InvalidInstance(
            "lambda_xy acts on a clamped layout".into(),
        ));
    }
    check_labels(table, labels)?;
    let target = pinned_feature_bits(&layout, table, labels);
    Ok(Projector::from_support(
        layout,
        vec![target],
        move |index| index == target,
    ))
}

/// Rank-Q^n projector onto the free-mode basis states whose feature bits
/// agree with their own label digits: for every (k, i),
/// b_{k,i} = (1 − f_k(x_i, y_i = j_i))/2, with the label selector acting
/// on the i-th label register.
pub fn build_lambda_x(layout: RegisterLayout, table: &FeatureTable) -> Result<Projector> {
    if layout.mode() != RegisterMode::Free {
        return Err(QcrfError::InvalidInstance(
            "lambda_x acts on a free layout".into(),
        ));
    }
    if table.positions() != layout.positions()
        || table.feature_count() != layout.feature_count()
        || table.label_count() != layout.label_count()
    {
        return Err(QcrfError::InvalidInstance(
            "feature table does not match register layout".into(),
        ));
    }
    const SUPPORT_CAP: u64 = 1 << 20;
    if layout.labelings() > SUPPORT_CAP {
        return Err(QcrfError::EnumerationTooLarge {
            states: layout.labelings() as u128,
            cap: SUPPORT_CAP as u128,
        });
    }
    let mut support = Vec::with_capacity(layout.labelings() as usize);
    for ordinal in 0..layout.labelings() {
        let labels = layout.decode_labeling(ordinal);
        let bits = pinned_feature_bits(&layout, table, &labels);
        support.push(layout.index_from_parts(&labels, bits));
    }
    support.sort_unstable();
    let table = Arc::new(table.clone());
    Ok(Projector::from_support(layout, support, move |index| {
        for i in 0..layout.positions() {
            let j = layout.label_at(index, i);
            if j >= table.label_count() {
                return false;
            }
            for k in 0..layout.feature_count() {
                let pinned = RegisterLayout::pinned_bit(table.sign(k, i, j));
                if layout.feature_bit(index, k, i) != pinned {
                    return false;
                }
            }
        }
        true
    }))
}

/// An assembled model instance: feature table, weights, training labels,
/// both register layouts and the cached operators.
#[derive(Debug, Clone)]
pub struct QcrfInstance {
    table: FeatureTable,
    weights: Weights,
    labels: Vec<usize>,
    clamped: RegisterLayout,
    free: RegisterLayout,
    h0: DiagonalOperator,
    hn: DiagonalOperator,
    lambda_xy: Projector,
    lambda_x: Projector,
}

impl QcrfInstance {
    pub fn new(table: FeatureTable, weights: Weights, labels: Vec<usize>) -> Result<Self> {
        if weights.len() != table.feature_count() {
            return Err(QcrfError::DimensionMismatch {
                what: "weights vs feature table",
                expected: table.feature_count(),
                actual: weights.len(),
            });
        }
        check_labels(&table, &labels)?;
        let n = table.positions();
        let k = table.feature_count();
        let q = table.label_count();
        let clamped = RegisterLayout::clamped(n, k, q)?;
        let free = RegisterLayout::free(n, k, q)?;
        let h0 = build_h(clamped, &weights)?;
        let hn = build_h(free, &weights)?;
        let lambda_xy = build_lambda_xy(clamped, &table, &labels)?;
        let lambda_x = build_lambda_x(free, &table)?;
        Ok(Self {
            table,
            weights,
            labels,
            clamped,
            free,
            h0,
            hn,
            lambda_xy,
            lambda_x,
        })
    }

    pub fn table(&self) -> &FeatureTable {
        &self.table
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn clamped_layout(&self) -> RegisterLayout {
        self.clamped
    }

    pub fn free_layout(&self) -> RegisterLayout {
        self.free
    }

    pub fn h0(&self) -> &DiagonalOperator {
        &self.h0
    }

    pub fn hn(&self) -> &DiagonalOperator {
        &self.hn
    }

    pub fn lambda_xy(&self) -> &Projector {
        &self.lambda_xy
    }

    pub fn lambda_x(&self) -> &Projector {
        &self.lambda_x
    }

    /// ∂H⁽⁰⁾/∂w_k.
    pub fn dh0(&self, k: usize) -> Result<DiagonalOperator> {
        dh_dw(self.clamped, k)
    }

    /// ∂H⁽ⁿ⁾/∂w_k.
    pub fn dhn(&self, k: usize) -> Result<DiagonalOperator> {
        dh_dw(self.free, k)
    }

    /// Λ_{X,Y} for an arbitrary labeling of the same observations.
    pub fn lambda_xy_for(&self, labels: &[usize]) -> Result<Projector> {
        build_lambda_xy(self.clamped, &self.table, labels)
    }

    /// Rebuild the cached Hamiltonians for new weights.
    pub fn with_weights(&self, weights: Weights) -> Result<Self> {
        Self::new(self.table.clone(), weights, self.labels.clone())
    }
}
