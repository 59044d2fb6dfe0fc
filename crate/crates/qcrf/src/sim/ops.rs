//! The register-level pipeline operations.
//!
//! Every operation is a branchwise permutation of computational-basis
//! keys (collisions are rejected), so the ℓ2 norm is preserved exactly
//! until one of the two explicit measurements. Diagonal observables make
//! phase estimation deterministic: each basis branch is an eigenvector,
//! so the precision register receives the exact r-bit code of its
//! eigenvalue with probability 1.
//!
//! The in-place EXP and multiply maps model the net effect of the
//! out-of-place reversible circuits (compute into a fresh register, swap,
//! uncompute the source through the eigenvalue oracle). Their inverses
//! therefore consume the same diagonal-operator oracles as the forward
//! passes.

use super::config::PrecisionConfig;
use super::state::{BranchKey, RegisterState};
use crate::error::{QcrfError, Result};
use crate::model::{DiagonalOperator, Projector, RegisterLayout};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest branch count the simulator will materialize.
pub const SIMULATION_BRANCH_CAP: u64 = 1 << 16;

/// Which precision register an operation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionRegister {
    Second,
    Third,
}

impl PrecisionRegister {
    fn name(self) -> &'static str {
        match self {
            PrecisionRegister::Second => "reg2",
            PrecisionRegister::Third => "reg3",
        }
    }

    fn window(self, cfg: &PrecisionConfig) -> super::config::PhaseWindow {
        match self {
            PrecisionRegister::Second => cfg.h_window(),
            PrecisionRegister::Third => cfg.factor_window(),
        }
    }

    fn read(self, key: &BranchKey) -> i64 {
        match self {
            PrecisionRegister::Second => key.reg2,
            PrecisionRegister::Third => key.reg3,
        }
    }

    fn write(self, key: &BranchKey, value: i64) -> BranchKey {
        let mut next = *key;
        match self {
            PrecisionRegister::Second => next.reg2 = value,
            PrecisionRegister::Third => next.reg3 = value,
        }
        next
    }
}

/// Uniform superposition 1/√D over every basis state of the layout, with
/// both precision registers and the ancilla zeroed.
pub fn prepare_uniform(layout: RegisterLayout) -> Result<RegisterState> {
    let dim = layout.dim();
    if dim > SIMULATION_BRANCH_CAP {
        return Err(QcrfError::SimulationCapExceeded {
            branches: dim as u128,
            cap: SIMULATION_BRANCH_CAP as u128,
        });
    }
    let amplitude = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let mut state = RegisterState::new(layout);
    for main in 0..dim {
        state.set_amplitude(BranchKey::main(main), amplitude);
    }
    Ok(state)
}

fn check_op_layout(state: &RegisterState, op: &DiagonalOperator) -> Result<()> {
    if state.layout() != op.layout() {
        return Err(QcrfError::InvalidInstance(
            "operator layout does not match the register state".into(),
        ));
    }
    Ok(())
}

/// Phase estimation of a diagonal observable into the target register:
/// each branch |ψ_b⟩|0⟩ becomes |ψ_b⟩|code(entry_b)⟩.
pub fn phase_estimate(
    state: &mut RegisterState,
    op: &DiagonalOperator,
    target: PrecisionRegister,
    cfg: &PrecisionConfig,
) -> Result<()> {
    check_op_layout(state, op)?;
    if state.iter().any(|(key, _)| target.read(key) != 0) {
        return Err(QcrfError::RegisterNotZero {
            register: target.name(),
        });
    }
    let window = target.window(cfg);
    state.permute_branches(|key| {
        let code = window.encode(op.entry(key.main), cfg.r());
        Ok(target.write(key, code))
    })
}

/// Exact inverse of [`phase_estimate`]: recomputes each branch's code
/// from the operator, verifies it against the register and zeroes it.
pub fn phase_estimate_inverse(
    state: &mut RegisterState,
    op: &DiagonalOperator,
    target: PrecisionRegister,
    cfg: &PrecisionConfig,
) -> Result<()> {
    check_op_layout(state, op)?;
    let window = target.window(cfg);
    state.permute_branches(|key| {
        let expected = window.encode(op.entry(key.main), cfg.r());
        let found = target.read(key);
        if found != expected {
            return Err(QcrfError::RegisterMismatch {
                register: target.name(),
                branch: key.main,
                expected,
                found,
            });
        }
        Ok(target.write(key, 0))
    })
}

/// EXP gate on the second register: the phase code of an eigenvalue E is
/// replaced by the fixed-point code of e^E. Overflow surfaces as a
/// saturation error naming the branch.
pub fn apply_exp(state: &mut RegisterState, cfg: &PrecisionConfig) -> Result<()> {
    let window = cfg.h_window();
    let codec = cfg.codec();
    state.permute_branches(|key| {
        let eigenvalue = window.decode(key.reg2, cfg.r());
        let code = codec.encode(eigenvalue.exp(), key.main)?;
        Ok(BranchKey {
            reg2: code,
            ..*key
        })
    })
}

/// Inverse of [`apply_exp`], uncomputing through the Hamiltonian oracle.
pub fn apply_exp_inverse(
    state: &mut RegisterState,
    h: &DiagonalOperator,
    cfg: &PrecisionConfig,
) -> Result<()> {
    check_op_layout(state, h)?;
    let window = cfg.h_window();
    let codec = cfg.codec();
    state.permute_branches(|key| {
        let phase = window.encode(h.entry(key.main), cfg.r());
        let expected = codec.encode(window.decode(phase, cfg.r()).exp(), key.main)?;
        if key.reg2 != expected {
            return Err(QcrfError::RegisterMismatch {
                register: "reg2",
                branch: key.main,
                expected,
                found: key.reg2,
            });
        }
        Ok(BranchKey {
            reg2: phase,
            ..*key
        })
    })
}

/// Multiply gate folding the third register into the second: reg2 holds
/// the fixed-point product λ = μ · e^E and reg3 returns to zero (the
/// second phase estimation is uncomputed as part of the net map).
pub fn apply_multiply(state: &mut RegisterState, cfg: &PrecisionConfig) -> Result<()> {
    let window = cfg.factor_window();
    let codec = cfg.codec();
    state.permute_branches(|key| {
        let factor = window.decode(key.reg3, cfg.r());
        let factor_code = codec.encode(factor, key.main)?;
        let product = codec.multiply(factor_code, key.reg2, key.main)?;
        Ok(BranchKey {
            reg2: product,
            reg3: 0,
            ..*key
        })
    })
}

/// Inverse of [`apply_multiply`], uncomputing through both oracles.
pub fn apply_multiply_inverse(
    state: &mut RegisterState,
    h: &DiagonalOperator,
    factor: &DiagonalOperator,
    cfg: &PrecisionConfig,
) -> Result<()> {
    check_op_layout(state, h)?;
    check_op_layout(state, factor)?;
    let h_window = cfg.h_window();
    let f_window = cfg.factor_window();
    let codec = cfg.codec();
    state.permute_branches(|key| {
        let phase_mu = f_window.encode(factor.entry(key.main), cfg.r());
        let mu_code = codec.encode(f_window.decode(phase_mu, cfg.r()), key.main)?;
        let phase_h = h_window.encode(h.entry(key.main), cfg.r());
        let e_code = codec.encode(h_window.decode(phase_h, cfg.r()).exp(), key.main)?;
        let expected = codec.multiply(mu_code, e_code, key.main)?;
        if key.reg2 != expected || key.reg3 != 0 {
            return Err(QcrfError::RegisterMismatch {
                register: "reg2",
                branch: key.main,
                expected,
                found: key.reg2,
            });
        }
        Ok(BranchKey {
            reg2: e_code,
            reg3: phase_mu,
            ..*key
        })
    })
}

/// Rotation amplitudes per branch: q_b = C √λ_b with λ_b read from the
/// second register. Fails on negative λ (run sign-split parts instead)
/// or if any amplitude would exceed 1.
fn rotation_amplitudes(
    state: &RegisterState,
    c: f64,
    cfg: &PrecisionConfig,
) -> Result<Vec<(BranchKey, Complex64, f64)>> {
    let codec = cfg.codec();
    let mut branches = Vec::with_capacity(state.branch_count());
    let mut q_max: f64 = 0.0;
    let mut lambda_max: f64 = 0.0;
    for (key, amplitude) in state.iter() {
        let lambda = codec.decode(key.reg2);
        if lambda < 0.0 {
            return Err(QcrfError::NegativeLambda {
                branch: key.main,
                value: lambda,
            });
        }
        let q = c * lambda.sqrt();
        q_max = q_max.max(q);
        lambda_max = lambda_max.max(lambda);
        branches.push((*key, *amplitude, q));
    }
    if q_max > 1.0 + 1e-12 {
        return Err(QcrfError::RotationAmplitudeTooLarge {
            c,
            q_max,
            lambda_max,
        });
    }
    for (_, _, q) in branches.iter_mut() {
        *q = q.min(1.0);
    }
    Ok(branches)
}

/// The analytic post-selection success probability C² Σ λ_b |a_b|² / 1,
/// evaluated from the current branch amplitudes.
pub fn analytic_success_probability(
    state: &RegisterState,
    c: f64,
    cfg: &PrecisionConfig,
) -> Result<f64> {
    let branches = rotation_amplitudes(state, c, cfg)?;
    Ok(branches
        .iter()
        .map(|(_, amplitude, q)| amplitude.norm_sqr() * q * q)
        .sum())
}

/// The post-selected state |φ⟩ ∝ Σ √λ_b |ψ_b⟩ with the precision
/// register uncomputed, together with the success probability.
pub fn collapse_postselected(
    state: &RegisterState,
    c: f64,
    cfg: &PrecisionConfig,
) -> Result<(RegisterState, f64)> {
    let branches = rotation_amplitudes(state, c, cfg)?;
    let p0: f64 = branches
        .iter()
        .map(|(_, amplitude, q)| amplitude.norm_sqr() * q * q)
        .sum();
    let mut collapsed = RegisterState::new(*state.layout());
    if p0 > 0.0 {
        let norm = p0.sqrt();
        for (key, amplitude, q) in &branches {
            if *q > 0.0 {
                collapsed.set_amplitude(
                    BranchKey {
                        reg2: 0,
                        ..*key
                    },
                    amplitude * (q / norm),
                );
            }
        }
    }
    Ok((collapsed, p0))
}

/// One controlled-rotation attempt: attach ancilla amplitudes
/// q_b|0⟩ + √(1−q_b²)|1⟩, measure the ancilla, and collapse.
///
/// On success (outcome 0) the state becomes |φ⟩ with the precision
/// register uncomputed; on failure the ancilla is left in |1⟩ with the
/// registers intact. Returns whether post-selection succeeded.
pub fn controlled_rotation_postselect(
    state: &mut RegisterState,
    c: f64,
    cfg: &PrecisionConfig,
    seed: u64,
) -> Result<bool> {
    let branches = rotation_amplitudes(state, c, cfg)?;
    let p0: f64 = branches
        .iter()
        .map(|(_, amplitude, q)| amplitude.norm_sqr() * q * q)
        .sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let success = rng.random::<f64>() < p0;
    let mut next = std::collections::BTreeMap::new();
    if success {
        let norm = p0.sqrt();
        for (key, amplitude, q) in &branches {
            if *q > 0.0 {
                next.insert(
                    BranchKey {
                        reg2: 0,
                        ..*key
                    },
                    amplitude * (q / norm),
                );
            }
        }
    } else {
        let norm = (1.0 - p0).max(f64::MIN_POSITIVE).sqrt();
        for (key, amplitude, q) in &branches {
            let residual = (1.0 - q * q).max(0.0).sqrt();
            if residual > 0.0 {
                next.insert(
                    BranchKey {
                        ancilla: 1,
                        ..*key
                    },
                    amplitude * (residual / norm),
                );
            }
        }
    }
    state.replace_branches(next);
    Ok(success)
}

/// Measure a projective observable `m` times on copies of the state:
/// each shot is a Bernoulli draw with success probability
/// ⟨φ|P|φ⟩ = Σ_{b ∈ supp P} |a_b|². Returns the sample mean and the
/// binomial standard error √(p̂(1−p̂)/m).
pub fn measure_projector(
    state: &RegisterState,
    projector: &Projector,
    m: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if state.layout() != projector.layout() {
        return Err(QcrfError::InvalidInstance(
            "projector layout does not match the register state".into(),
        ));
    }
    if m == 0 {
        return Err(QcrfError::InvalidInstance(
            "measurement needs at least one shot".into(),
        ));
    }
    let p_hit: f64 = state
        .iter()
        .filter(|(key, _)| projector.contains(key.main))
        .map(|(_, amplitude)| amplitude.norm_sqr())
        .sum::<f64>()
        .clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..m {
        if rng.random::<f64>() < p_hit {
            hits += 1;
        }
    }
    let mean = hits as f64 / m as f64;
    let std_error = (mean * (1.0 - mean) / m as f64).sqrt();
    Ok((mean, std_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crf::Weights;
    use crate::model::build_h;

    fn small_cfg(n: usize, w: &Weights) -> PrecisionConfig {
        PrecisionConfig::for_model(n, w, 12, 0.1).unwrap()
    }

    #[test]
    fn uniform_preparation() {
        let layout = RegisterLayout::clamped(1, 1, 2).unwrap();
        let state = prepare_uniform(layout).unwrap();
        assert_eq!(state.branch_count(), 2);
        let amp = state.amplitude(&BranchKey::main(0)).re;
        assert!((amp - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        assert!((state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_preparation_at_reference_scale() {
        // Free mode, Q=2, n=2, K=5: 4096 branches in one pass.
        let layout = RegisterLayout::free(2, 5, 2).unwrap();
        let state = prepare_uniform(layout).unwrap();
        assert_eq!(state.branch_count() as u64, layout.labelings() * (1 << 10));
        assert!((state.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn uniform_preparation_respects_cap() {
        let layout = RegisterLayout::clamped(17, 1, 2).unwrap();
        assert!(matches!(
            prepare_uniform(layout),
            Err(QcrfError::SimulationCapExceeded { .. })
        ));
    }

    #[test]
    fn phase_estimation_of_zero_operator() {
        let layout = RegisterLayout::clamped(2, 1, 2).unwrap();
        let w = Weights::zeros(1, 0.1).unwrap();
        let cfg = small_cfg(2, &w);
        let h = DiagonalOperator::zero(layout);
        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        for (key, _) in state.iter() {
            assert_eq!(key.reg2, 0, "zero operator must code eigenvalue 0");
        }
    }

    #[test]
    fn phase_estimation_requires_zero_target() {
        let layout = RegisterLayout::clamped(1, 1, 2).unwrap();
        let w = Weights::new(vec![0.4], 0.1).unwrap();
        let cfg = small_cfg(1, &w);
        let h = build_h(layout, &w).unwrap();
        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        assert!(matches!(
            phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg),
            Err(QcrfError::RegisterNotZero { register: "reg2" })
        ));
    }

    #[test]
    fn phase_estimation_composes_with_inverse() {
        let layout = RegisterLayout::clamped(2, 2, 2).unwrap();
        let w = Weights::new(vec![0.3, -0.7], 0.1).unwrap();
        let cfg = small_cfg(2, &w);
        let h = build_h(layout, &w).unwrap();
        let mut state = prepare_uniform(layout).unwrap();
        let before = state.clone();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-10);
        phase_estimate_inverse(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        assert_eq!(state.branch_count(), before.branch_count());
        for (key, amplitude) in before.iter() {
            assert_eq!(state.amplitude(key), *amplitude);
        }
    }

    #[test]
    fn exp_gate_writes_unit_code_for_zero_eigenvalue() {
        let layout = RegisterLayout::clamped(1, 1, 2).unwrap();
        let w = Weights::zeros(1, 0.1).unwrap();
        let cfg = small_cfg(1, &w);
        let h = DiagonalOperator::zero(layout);
        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        apply_exp(&mut state, &cfg).unwrap();
        let codec = cfg.codec();
        for (key, _) in state.iter() {
            assert_eq!(codec.decode(key.reg2), 1.0, "e^0 = 1 exactly on the grid");
        }
    }

    #[test]
    fn exp_and_multiply_compose_with_inverses() {
        let layout = RegisterLayout::clamped(2, 2, 2).unwrap();
        let w = Weights::new(vec![0.5, 0.2], 0.1).unwrap();
        let cfg = small_cfg(2, &w);
        let h = build_h(layout, &w).unwrap();
        let factor = crate::model::dh_dw(layout, 0).unwrap().positive_part();

        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        phase_estimate(&mut state, &factor, PrecisionRegister::Third, &cfg).unwrap();
        let after_pe = state.clone();

        apply_exp(&mut state, &cfg).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-10);
        let after_exp = state.clone();

        apply_multiply(&mut state, &cfg).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-10);
        for (key, _) in state.iter() {
            assert_eq!(key.reg3, 0, "multiply must uncompute reg3");
        }

        apply_multiply_inverse(&mut state, &h, &factor, &cfg).unwrap();
        for (key, amplitude) in after_exp.iter() {
            assert_eq!(state.amplitude(key), *amplitude);
        }
        apply_exp_inverse(&mut state, &h, &cfg).unwrap();
        for (key, amplitude) in after_pe.iter() {
            assert_eq!(state.amplitude(key), *amplitude);
        }
    }

    #[test]
    fn multiply_handles_zero_factor_branches() {
        // µ = 0 branches must map to λ = 0.
        let layout = RegisterLayout::clamped(2, 1, 2).unwrap();
        let w = Weights::new(vec![0.3], 0.1).unwrap();
        let cfg = small_cfg(2, &w);
        let h = build_h(layout, &w).unwrap();
        let factor = crate::model::dh_dw(layout, 0).unwrap().positive_part();
        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        phase_estimate(&mut state, &factor, PrecisionRegister::Third, &cfg).unwrap();
        apply_exp(&mut state, &cfg).unwrap();
        apply_multiply(&mut state, &cfg).unwrap();
        let codec = cfg.codec();
        // Branches 0b01 and 0b10 have µ⁺ = 0.
        for main in [1u64, 2] {
            let found = state
                .iter()
                .find(|(key, _)| key.main == main)
                .map(|(key, _)| codec.decode(key.reg2))
                .unwrap();
            assert_eq!(found, 0.0);
        }
    }

    #[test]
    fn rotation_rejects_oversized_c() {
        let layout = RegisterLayout::clamped(1, 1, 2).unwrap();
        let w = Weights::new(vec![0.9], 0.1).unwrap();
        let cfg = small_cfg(1, &w);
        let h = build_h(layout, &w).unwrap();
        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        apply_exp(&mut state, &cfg).unwrap();
        // λ_max ≈ e^0.9 ≈ 2.46, so C = 1 overflows the amplitude.
        assert!(matches!(
            controlled_rotation_postselect(&mut state, 1.0, &cfg, 3),
            Err(QcrfError::RotationAmplitudeTooLarge { .. })
        ));
    }

    #[test]
    fn rotation_success_statistics_match_analytic_probability() {
        let layout = RegisterLayout::clamped(2, 1, 2).unwrap();
        let w = Weights::new(vec![0.6], 0.1).unwrap();
        let cfg = small_cfg(2, &w);
        let h = build_h(layout, &w).unwrap();
        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        apply_exp(&mut state, &cfg).unwrap();
        let codec = cfg.codec();
        let lambda_max = state
            .iter()
            .map(|(key, _)| codec.decode(key.reg2))
            .fold(0.0f64, f64::max);
        let c = 1.0 / lambda_max.sqrt();
        let p0 = analytic_success_probability(&state, c, &cfg).unwrap();

        let attempts = 10_000u64;
        let mut successes = 0u64;
        for attempt in 0..attempts {
            let mut trial = state.clone();
            if controlled_rotation_postselect(&mut trial, c, &cfg, attempt).unwrap() {
                successes += 1;
                // Success collapses onto |φ⟩ with the register uncomputed.
                assert!((trial.norm() - 1.0).abs() < 1e-10);
                assert!(trial.iter().all(|(key, _)| key.reg2 == 0));
            } else {
                assert!(trial.iter().all(|(key, _)| key.ancilla == 1));
            }
        }
        let frequency = successes as f64 / attempts as f64;
        let sigma = (p0 * (1.0 - p0) / attempts as f64).sqrt();
        assert!(
            (frequency - p0).abs() <= 3.0 * sigma,
            "frequency {frequency} vs analytic {p0} (3σ = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn equal_lambdas_collapse_to_uniform_state() {
        // All λ equal: |φ⟩ is uniform and P(0) = C²λ.
        let layout = RegisterLayout::clamped(1, 1, 2).unwrap();
        let w = Weights::zeros(1, 0.1).unwrap();
        let cfg = small_cfg(1, &w);
        let h = DiagonalOperator::zero(layout);
        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        apply_exp(&mut state, &cfg).unwrap();
        let c = 0.5f64;
        let (phi, p0) = collapse_postselected(&state, c, &cfg).unwrap();
        assert!((p0 - c * c).abs() < 1e-12, "P(0) = C²λ with λ = 1");
        for (_, amplitude) in phi.iter() {
            assert!((amplitude.re - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_measurement_degenerate_cases() {
        let layout = RegisterLayout::clamped(1, 1, 2).unwrap();
        let state = prepare_uniform(layout).unwrap();
        let all = Projector::from_indicator(layout, |_| true).unwrap();
        let none = Projector::from_indicator(layout, |_| false).unwrap();
        let (mean, se) = measure_projector(&state, &all, 500, 1).unwrap();
        assert_eq!((mean, se), (1.0, 0.0));
        let (mean, se) = measure_projector(&state, &none, 500, 1).unwrap();
        assert_eq!((mean, se), (0.0, 0.0));
    }

    #[test]
    fn projector_measurement_matches_expectation() {
        let layout = RegisterLayout::clamped(2, 1, 2).unwrap();
        let w = Weights::new(vec![0.8], 0.1).unwrap();
        let cfg = small_cfg(2, &w);
        let h = build_h(layout, &w).unwrap();
        let mut state = prepare_uniform(layout).unwrap();
        phase_estimate(&mut state, &h, PrecisionRegister::Second, &cfg).unwrap();
        apply_exp(&mut state, &cfg).unwrap();
        let codec = cfg.codec();
        let lambda_max = state
            .iter()
            .map(|(key, _)| codec.decode(key.reg2))
            .fold(0.0f64, f64::max);
        let (phi, _) = collapse_postselected(&state, 1.0 / lambda_max.sqrt(), &cfg).unwrap();
        let projector = Projector::from_indicator(layout, |main| main == 0).unwrap();
        let exact: f64 = phi
            .iter()
            .filter(|(key, _)| key.main == 0)
            .map(|(_, amplitude)| amplitude.norm_sqr())
            .sum();
        let m = 100_000u64;
        let (mean, se) = measure_projector(&phi, &projector, m, 99).unwrap();
        assert!(
            (mean - exact).abs() <= 3.0 * se.max(1e-9),
            "mean {mean} vs exact {exact} (3se = {})",
            3.0 * se
        );
    }
}
