//! Potential, conditional probability and negative log-likelihood.

use super::types::{check_labeling, check_weights_table, Dataset, FeatureTable, Weights};
use crate::error::Result;

/// Per-position node score s_i(j) = Σ_k w_k f_k(x_i, j).
pub(crate) fn node_score(table: &FeatureTable, w: &Weights, i: usize, j: usize) -> f64 {
    w.values()
        .iter()
        .enumerate()
        .map(|(k, wk)| wk * table.signf(k, i, j))
        .sum()
}

/// log Σ_j exp(v_j), with max-subtraction.
pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Potential E(x, y) = Σ_i Σ_k w_k f_k(x_i, y_i).
pub fn potential(table: &FeatureTable, w: &Weights, y: &[usize]) -> Result<f64> {
    check_weights_table(w, table)?;
    check_labeling(table, y)?;
    let mut total = 0.0;
    for (i, &j) in y.iter().enumerate() {
        for (k, wk) in w.values().iter().enumerate() {
            total += wk * table.signf(k, i, j);
        }
    }
    Ok(total)
}

/// log Z, the log partition sum over all labelings, via the node
/// factorization log Z = Σ_i log Σ_j exp(s_i(j)).
pub(crate) fn log_partition(table: &FeatureTable, w: &Weights) -> f64 {
    (0..table.positions())
        .map(|i| log_sum_exp((0..table.label_count()).map(|j| node_score(table, w, i, j))))
        .sum()
}

/// log P(y|x) = E(x, y) − log Z.
pub fn log_conditional_probability(table: &FeatureTable, w: &Weights, y: &[usize]) -> Result<f64> {
    Ok(potential(table, w, y)? - log_partition(table, w))
}

/// Conditional probability P(y|x) of one labeling.
pub fn conditional_probability(table: &FeatureTable, w: &Weights, y: &[usize]) -> Result<f64> {
    Ok(log_conditional_probability(table, w, y)?.exp())
}

/// Average negative log-likelihood −Σ P_data(x, y) log P(y|x).
pub fn nll(ds: &Dataset, w: &Weights) -> Result<f64> {
    let mut total = 0.0;
    for record in ds.records() {
        total -= record.weight * log_conditional_probability(&record.table, w, &record.labels)?;
    }
    Ok(total)
}
