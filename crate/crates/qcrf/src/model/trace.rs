//! Traces of projected operator exponentials and the exact quantum-form
//! probability and gradient built from them.

use super::build::QcrfInstance;
use super::operator::{DiagonalOperator, Projector};
use crate::crf::{Dataset, Weights};
use crate::error::{QcrfError, Result};

fn check_shared_layout(p: &Projector, h: &DiagonalOperator) -> Result<()> {
    if p.layout() != h.layout() {
        return Err(QcrfError::InvalidInstance(
            "projector and operator act on different layouts".into(),
        ));
    }
    Ok(())
}

/// Max entry of `h` over the projector support (for max-subtraction).
fn support_max(p: &Projector, h: &DiagonalOperator) -> f64 {
    p.support()
        .iter()
        .map(|&b| h.entry(b))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// log Tr(P e^H) = log Σ_{b ∈ supp P} e^{H_b}, evaluated with
/// max-subtraction so large spectra never overflow.
pub fn log_trace_lambda_exp(p: &Projector, h: &DiagonalOperator) -> Result<f64> {
    check_shared_layout(p, h)?;
    let max = support_max(p, h);
    let sum: f64 = p.support().iter().map(|&b| (h.entry(b) - max).exp()).sum();
    Ok(max + sum.ln())
}

/// Tr(P e^H): the projected exponential trace, restricted to the
/// projector support.
pub fn trace_lambda_exp(p: &Projector, h: &DiagonalOperator) -> Result<f64> {
    check_shared_layout(p, h)?;
    let max = support_max(p, h);
    let sum: f64 = p.support().iter().map(|&b| (h.entry(b) - max).exp()).sum();
    Ok(max.exp() * sum)
}

/// Tr(P F e^H) for an extra diagonal factor F (the ∂H/∂w_k variant).
pub fn trace_lambda_exp_weighted(
    p: &Projector,
    h: &DiagonalOperator,
    factor: &DiagonalOperator,
) -> Result<f64> {
    check_shared_layout(p, h)?;
    check_shared_layout(p, factor)?;
    let max = support_max(p, h);
    let sum: f64 = p
        .support()
        .iter()
        .map(|&b| (h.entry(b) - max).exp() * factor.entry(b))
        .sum();
    Ok(max.exp() * sum)
}

/// Tr(P F e^H) / Tr(P e^H), with the shared max-subtraction cancelling so
/// the ratio stays finite for any weight scale.
pub fn weighted_trace_ratio(
    p: &Projector,
    h: &DiagonalOperator,
    factor: &DiagonalOperator,
) -> Result<f64> {
    check_shared_layout(p, h)?;
    check_shared_layout(p, factor)?;
    let max = support_max(p, h);
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for &b in p.support() {
        let weight = (h.entry(b) - max).exp();
        numerator += weight * factor.entry(b);
        denominator += weight;
    }
    Ok(numerator / denominator)
}

/// The quantum-form conditional probability
/// Tr(Λ_{X,Y} e^{H⁽⁰⁾}) / Tr(Λ_X e^{H⁽ⁿ⁾}), evaluated in log space.
///
/// Both traces are strictly positive — every summand is an exponential —
/// so the ratio is always well defined.
pub fn quantum_probability(instance: &QcrfInstance, y: &[usize]) -> Result<f64> {
    let lambda_xy = instance.lambda_xy_for(y)?;
    let log_num = log_trace_lambda_exp(&lambda_xy, instance.h0())?;
    let log_den = log_trace_lambda_exp(instance.lambda_x(), instance.hn())?;
    debug_assert!(log_den.is_finite());
    Ok((log_num - log_den).exp())
}

/// Exact quantum-form gradient: for every feature k,
/// ∂L/∂w_k = −Σ P_data [⟨e^{H⁽⁰⁾}⟩^{Q,k}_{X,Y} − ⟨e^{H⁽ⁿ⁾}⟩^{Q,k}_X],
/// with each average the ratio of a derivative trace to its plain trace.
pub fn quantum_gradient_exact(ds: &Dataset, w: &Weights) -> Result<Vec<f64>> {
    let mut gradient = vec![0.0; w.len()];
    for record in ds.records() {
        let instance = QcrfInstance::new(record.table.clone(), w.clone(), record.labels.clone())?;
        for k in 0..w.len() {
            let clamped = weighted_trace_ratio(
                instance.lambda_xy(),
                instance.h0(),
                &instance.dh0(k)?,
            )?;
            let free =
                weighted_trace_ratio(instance.lambda_x(), instance.hn(), &instance.dhn(k)?)?;
            gradient[k] -= record.weight * (clamped - free);
        }
    }
    Ok(gradient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crf::{conditional_probability, potential, Dataset, FeatureTable};
    use crate::instances::sample_instance;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_weights_traces_are_counting_measures() {
        // w = 0: Tr(Λ_{X,Y} e^{H⁽⁰⁾}) = 1 and Tr(Λ_X e^{H⁽ⁿ⁾}) = Q^n.
        let inst = sample_instance(4, 1 << 12);
        let w = Weights::zeros(inst.table.feature_count(), 0.1).unwrap();
        let model = QcrfInstance::new(inst.table.clone(), w, inst.labels.clone()).unwrap();
        let t_xy = trace_lambda_exp(model.lambda_xy(), model.h0()).unwrap();
        let t_x = trace_lambda_exp(model.lambda_x(), model.hn()).unwrap();
        assert_abs_diff_eq!(t_xy, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t_x, model.free_layout().labelings() as f64, epsilon = 1e-9);
    }

    #[test]
    fn clamped_average_collapses_to_feature_sum() {
        // Rank-1 projector: the ratio is exactly Σ_i f_k(x_i, y_i).
        for seed in 0..30u64 {
            let inst = sample_instance(seed, 1 << 12);
            let model =
                QcrfInstance::new(inst.table.clone(), inst.weights.clone(), inst.labels.clone())
                    .unwrap();
            for k in 0..inst.weights.len() {
                let ratio =
                    weighted_trace_ratio(model.lambda_xy(), model.h0(), &model.dh0(k).unwrap())
                        .unwrap();
                let direct = inst.table.feature_sum(k, &inst.labels);
                assert_eq!(ratio, direct);
            }
        }
    }

    #[test]
    fn quantum_probability_matches_degenerate_q1() {
        // Q = 1: the only labeling has probability 1.
        let table = FeatureTable::from_signs(2, 2, 1, vec![1, -1, 1, 1]).unwrap();
        let w = Weights::new(vec![0.3, -0.4], 0.1).unwrap();
        let model = QcrfInstance::new(table, w, vec![0, 0]).unwrap();
        assert_abs_diff_eq!(
            quantum_probability(&model, &[0, 0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn quantum_gradient_matches_classical_on_random_instances() {
        for seed in 0..50u64 {
            let inst = sample_instance(seed, 1 << 12);
            let ds = inst.dataset();
            let classical = crate::crf::gradient_naive(&ds, &inst.weights).unwrap();
            let quantum = quantum_gradient_exact(&ds, &inst.weights).unwrap();
            for (a, b) in classical.iter().zip(&quantum) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn traces_survive_large_weights() {
        // Scaled weights overflow naive exponentials; the log form stays
        // finite and matches the potential route.
        let inst = sample_instance(8, 1 << 10);
        let big = inst.weights.scaled(200.0).unwrap();
        let model = QcrfInstance::new(inst.table.clone(), big.clone(), inst.labels.clone()).unwrap();
        let log_num = log_trace_lambda_exp(model.lambda_xy(), model.h0()).unwrap();
        let e = potential(&inst.table, &big, &inst.labels).unwrap();
        assert_abs_diff_eq!(log_num, e, epsilon = 1e-9);
        let p = quantum_probability(&model, &inst.labels).unwrap();
        let classical = conditional_probability(&inst.table, &big, &inst.labels).unwrap();
        assert_abs_diff_eq!(p, classical, epsilon = 1e-12);
    }

    #[test]
    fn zero_weight_probability_is_uniform() {
        let inst = sample_instance(21, 1 << 12);
        let w = Weights::zeros(inst.table.feature_count(), 0.1).unwrap();
        let model = QcrfInstance::new(inst.table.clone(), w, inst.labels.clone()).unwrap();
        let p = quantum_probability(&model, &inst.labels).unwrap();
        assert_abs_diff_eq!(
            p,
            1.0 / model.free_layout().labelings() as f64,
            epsilon = 1e-12
        );
    }

    #[test]
    fn balanced_zero_weight_gradient_is_clamped_only() {
        let table = FeatureTable::from_signs(2, 1, 2, vec![1, -1, 1, -1]).unwrap();
        let labels = vec![0, 1];
        let expected = -table.feature_sum(0, &labels);
        let ds = Dataset::single(table, labels).unwrap();
        let w = Weights::zeros(1, 0.1).unwrap();
        let grad = quantum_gradient_exact(&ds, &w).unwrap();
        assert_abs_diff_eq!(grad[0], expected, epsilon = 1e-12);
    }
}
