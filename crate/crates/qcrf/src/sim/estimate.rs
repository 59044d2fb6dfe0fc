//! The assembled trace estimator and the sampled gradient built on it.
//!
//! One estimation pass prepares the uniform superposition, phase-estimates
//! the Hamiltonian (and, for derivative traces, one sign part of ∂H/∂w_k),
//! applies the EXP and multiply gates, post-selects the controlled
//! rotation and measures the projector on each post-selected copy. The
//! trace follows from the prefactor P̂(0) · D / C² applied to the
//! measured projector mean, with P̂(0) the empirical post-selection
//! frequency.
//!
//! Post-selection is repeat-until-success with an attempt budget of
//! ⌈50 / P(0)⌉ per copy. The unitary part of an attempt is deterministic,
//! so the pre-measurement state is built once and the per-copy attempt
//! count is drawn from the matching geometric distribution — the same
//! statistics as replaying the rotation per attempt, without re-running
//! the circuit.

use super::config::PrecisionConfig;
use super::ops::{
    analytic_success_probability, apply_exp, apply_multiply, collapse_postselected,
    phase_estimate, prepare_uniform, PrecisionRegister,
};
use super::split::SignSplit;
use crate::crf::{Dataset, Weights};
use crate::error::{QcrfError, Result};
use crate::model::{DiagonalOperator, Projector, QcrfInstance, RegisterLayout};
use crate::seeding::derive_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The four projected traces the gradient needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// Tr(Λ_X ∂e^{H⁽ⁿ⁾}/∂w_k)
    LxDhn,
    /// Tr(Λ_X e^{H⁽ⁿ⁾})
    LxHn,
    /// Tr(Λ_{X,Y} ∂e^{H⁽⁰⁾}/∂w_k)
    LxyDh0,
    /// Tr(Λ_{X,Y} e^{H⁽⁰⁾})
    LxyH0,
}

impl TraceKind {
    pub const ALL: [TraceKind; 4] = [
        TraceKind::LxDhn,
        TraceKind::LxHn,
        TraceKind::LxyDh0,
        TraceKind::LxyH0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TraceKind::LxDhn => "Lx_dHn",
            TraceKind::LxHn => "Lx_Hn",
            TraceKind::LxyDh0 => "Lxy_dH0",
            TraceKind::LxyH0 => "Lxy_H0",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|kind| kind.name() == text)
            .ok_or_else(|| QcrfError::Parse(format!("unknown trace kind {text:?}")))
    }

    pub fn is_derivative(self) -> bool {
        matches!(self, TraceKind::LxDhn | TraceKind::LxyDh0)
    }

    fn ordinal(self) -> u64 {
        match self {
            TraceKind::LxDhn => 0,
            TraceKind::LxHn => 1,
            TraceKind::LxyDh0 => 2,
            TraceKind::LxyH0 => 3,
        }
    }
}

/// Statistics of one estimation pass (one sign part).
#[derive(Debug, Clone)]
pub struct PassStats {
    pub value: f64,
    pub std_error: f64,
    pub attempts: u64,
    pub successes: u64,
    pub hits: u64,
    pub p0_analytic: f64,
    pub p0_empirical: f64,
    pub c: f64,
    /// True when the part was identically zero and no circuit ran.
    pub skipped: bool,
}

/// One trace estimate: the combined value of one or two passes.
#[derive(Debug, Clone)]
pub struct TraceEstimate {
    pub kind: TraceKind,
    pub k: Option<usize>,
    pub r: u32,
    pub shots: u64,
    pub value: f64,
    pub std_error: f64,
    pub postselect_attempts: u64,
    pub postselect_successes: u64,
    pub p0_empirical: f64,
    pub p0_analytic: f64,
    pub seed: u64,
    pub parts: Vec<PassStats>,
}

/// Attempts until the first post-selection success: a geometric draw
/// with success probability `p0`, matching a repeat-until-success loop.
fn sample_attempts(u: f64, p0: f64) -> u64 {
    if p0 >= 1.0 {
        return 1;
    }
    if p0 <= 0.0 {
        return u64::MAX;
    }
    let draws = 1.0 + ((1.0 - u).ln() / (-p0).ln_1p()).floor();
    if draws >= u64::MAX as f64 {
        u64::MAX
    } else {
        draws as u64
    }
}

/// Per-copy attempt budget, ⌈50 / P(0)⌉.
fn attempt_budget(p0: f64) -> u64 {
    if p0 <= 0.0 {
        return u64::MAX;
    }
    let budget = (50.0 / p0).ceil();
    if budget >= u64::MAX as f64 {
        u64::MAX
    } else {
        budget as u64
    }
}

/// Run the unitary part of one pass: superposition, phase estimation,
/// EXP and (for derivative passes) the multiply gate.
fn pipeline_state(
    layout: RegisterLayout,
    h: &DiagonalOperator,
    factor: Option<&DiagonalOperator>,
    cfg: &PrecisionConfig,
) -> Result<super::state::RegisterState> {
    let mut state = prepare_uniform(layout)?;
    phase_estimate(&mut state, h, PrecisionRegister::Second, cfg)?;
    if let Some(factor) = factor {
        phase_estimate(&mut state, factor, PrecisionRegister::Third, cfg)?;
    }
    apply_exp(&mut state, cfg)?;
    if factor.is_some() {
        apply_multiply(&mut state, cfg)?;
    }
    Ok(state)
}

fn skipped_pass() -> PassStats {
    PassStats {
        value: 0.0,
        std_error: 0.0,
        attempts: 0,
        successes: 0,
        hits: 0,
        p0_analytic: 0.0,
        p0_empirical: 0.0,
        c: 0.0,
        skipped: true,
    }
}

/// Sample one pass at every prefix of the shot grid.
fn sample_pass_prefixes(
    layout: RegisterLayout,
    h: &DiagonalOperator,
    factor: Option<&DiagonalOperator>,
    projector: &Projector,
    cfg: &PrecisionConfig,
    m_grid: &[u64],
    seed: u64,
) -> Result<Vec<PassStats>> {
    let state = pipeline_state(layout, h, factor, cfg)?;
    let codec = cfg.codec();
    let lambda_max = state
        .iter()
        .map(|(key, _)| codec.decode(key.reg2))
        .fold(0.0f64, f64::max);
    if lambda_max <= 0.0 {
        // The factor part is identically zero: the trace contribution is
        // exactly zero and post-selection could never succeed.
        return Ok(vec![skipped_pass(); m_grid.len()]);
    }
    let c = cfg.c_override().unwrap_or(1.0 / lambda_max.sqrt());
    let p0 = analytic_success_probability(&state, c, cfg)?;
    let (phi, _) = collapse_postselected(&state, c, cfg)?;
    let p_hit: f64 = phi
        .iter()
        .filter(|(key, _)| projector.contains(key.main))
        .map(|(_, amplitude)| amplitude.norm_sqr())
        .sum::<f64>()
        .clamp(0.0, 1.0);
    let budget = attempt_budget(p0);
    let dim = layout.dim() as f64;
    let prefactor_scale = dim / (c * c);

    let mut attempt_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0]));
    let mut shot_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1]));
    let mut results = Vec::with_capacity(m_grid.len());
    let mut attempts_total = 0u64;
    let mut hits = 0u64;
    let mut copies = 0u64;
    for &m in m_grid {
        while copies < m {
            let draws = sample_attempts(attempt_rng.random(), p0);
            if draws > budget {
                return Err(QcrfError::PostSelectionStarved {
                    attempts: attempts_total.saturating_add(budget),
                });
            }
            attempts_total += draws;
            if shot_rng.random::<f64>() < p_hit {
                hits += 1;
            }
            copies += 1;
        }
        let p_hat = hits as f64 / m as f64;
        let p0_empirical = copies as f64 / attempts_total as f64;
        let prefactor = p0_empirical * prefactor_scale;
        let value = prefactor * p_hat;
        // Binomial error of the projector mean propagated through the
        // prefactor, plus the prefactor's own post-selection noise.
        let variance =
            (p_hat * (1.0 - p_hat) + p_hat * p_hat * (1.0 - p0_empirical)) / m as f64;
        let std_error = prefactor * variance.max(0.0).sqrt();
        results.push(PassStats {
            value,
            std_error,
            attempts: attempts_total,
            successes: copies,
            hits,
            p0_analytic: p0,
            p0_empirical,
            c,
            skipped: false,
        });
    }
    Ok(results)
}

fn validate_grid(m_grid: &[u64]) -> Result<()> {
    if m_grid.is_empty() || m_grid[0] == 0 {
        return Err(QcrfError::InvalidInstance(
            "shot grid must start at m ≥ 1".into(),
        ));
    }
    if m_grid.windows(2).any(|pair| pair[1] <= pair[0]) {
        return Err(QcrfError::InvalidInstance(
            "shot grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn combine_parts(
    kind: TraceKind,
    k: Option<usize>,
    cfg: &PrecisionConfig,
    m: u64,
    seed: u64,
    positive: PassStats,
    negative: Option<PassStats>,
) -> TraceEstimate {
    let mut parts = vec![positive];
    if let Some(negative) = negative {
        parts.push(negative);
    }
    let value = parts[0].value - parts.get(1).map_or(0.0, |p| p.value);
    let std_error = parts
        .iter()
        .map(|p| p.std_error * p.std_error)
        .sum::<f64>()
        .sqrt();
    let attempts: u64 = parts.iter().map(|p| p.attempts).sum();
    let successes: u64 = parts.iter().map(|p| p.successes).sum();
    let p0_empirical = if attempts > 0 {
        successes as f64 / attempts as f64
    } else {
        0.0
    };
    // Expected attempts of the aggregate: Σ m/p0 over the live parts.
    let expected_attempts: f64 = parts
        .iter()
        .filter(|p| !p.skipped && p.p0_analytic > 0.0)
        .map(|p| p.successes as f64 / p.p0_analytic)
        .sum();
    let p0_analytic = if expected_attempts > 0.0 {
        successes as f64 / expected_attempts
    } else {
        0.0
    };
    TraceEstimate {
        kind,
        k,
        r: cfg.r(),
        shots: m,
        value,
        std_error,
        postselect_attempts: attempts,
        postselect_successes: successes,
        p0_empirical,
        p0_analytic,
        seed,
        parts,
    }
}

/// Estimate one trace at every prefix of the shot grid.
pub fn estimate_trace_prefixes(
    instance: &QcrfInstance,
    kind: TraceKind,
    k: Option<usize>,
    cfg: &PrecisionConfig,
    m_grid: &[u64],
    seed: u64,
) -> Result<Vec<TraceEstimate>> {
    validate_grid(m_grid)?;
    let (layout, h, projector) = match kind {
        TraceKind::LxyH0 | TraceKind::LxyDh0 => {
            (instance.clamped_layout(), instance.h0(), instance.lambda_xy())
        }
        TraceKind::LxHn | TraceKind::LxDhn => {
            (instance.free_layout(), instance.hn(), instance.lambda_x())
        }
    };
    if kind.is_derivative() {
        let k = k.ok_or_else(|| {
            QcrfError::InvalidInstance("derivative traces need a feature index".into())
        })?;
        let mu = match kind {
            TraceKind::LxyDh0 => instance.dh0(k)?,
            _ => instance.dhn(k)?,
        };
        let split = SignSplit::of(&mu);
        let positive = sample_pass_prefixes(
            layout,
            h,
            Some(&split.positive),
            projector,
            cfg,
            m_grid,
            derive_seed(seed, &[kind.ordinal(), 0]),
        )?;
        let negative = sample_pass_prefixes(
            layout,
            h,
            Some(&split.negative),
            projector,
            cfg,
            m_grid,
            derive_seed(seed, &[kind.ordinal(), 1]),
        )?;
        Ok(positive
            .into_iter()
            .zip(negative)
            .zip(m_grid)
            .map(|((pos, neg), &m)| combine_parts(kind, Some(k), cfg, m, seed, pos, Some(neg)))
            .collect())
    } else {
        let stats = sample_pass_prefixes(
            layout,
            h,
            None,
            projector,
            cfg,
            m_grid,
            derive_seed(seed, &[kind.ordinal(), 0]),
        )?;
        Ok(stats
            .into_iter()
            .zip(m_grid)
            .map(|(stat, &m)| combine_parts(kind, k, cfg, m, seed, stat, None))
            .collect())
    }
}

/// Estimate one trace with `m` post-selected copies.
pub fn estimate_trace(
    instance: &QcrfInstance,
    kind: TraceKind,
    k: Option<usize>,
    cfg: &PrecisionConfig,
    m: u64,
    seed: u64,
) -> Result<TraceEstimate> {
    Ok(estimate_trace_prefixes(instance, kind, k, cfg, &[m], seed)?
        .pop()
        .expect("one grid point yields one estimate"))
}

/// Estimator parameters that do not depend on the instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSettings {
    pub r: u32,
    pub epsilon: f64,
    pub c_override: Option<f64>,
}

impl EstimatorSettings {
    pub fn new(r: u32, epsilon: f64) -> Self {
        Self {
            r,
            epsilon,
            c_override: None,
        }
    }

    pub fn config_for(&self, n: usize, w: &Weights) -> Result<PrecisionConfig> {
        let cfg = PrecisionConfig::for_model(n, w, self.r, self.epsilon)?;
        Ok(match self.c_override {
            Some(c) => cfg.with_c(c),
            None => cfg,
        })
    }
}

/// The four trace estimates behind one gradient component of one record.
#[derive(Debug, Clone)]
pub struct ComponentTraces {
    pub record: usize,
    pub k: usize,
    pub lxy_h0: TraceEstimate,
    pub lxy_dh0: TraceEstimate,
    pub lx_hn: TraceEstimate,
    pub lx_dhn: TraceEstimate,
}

/// A sampled gradient with first-order error propagation.
#[derive(Debug, Clone)]
pub struct QuantumGradient {
    pub gradient: Vec<f64>,
    pub std_error: Vec<f64>,
    pub traces: Vec<ComponentTraces>,
    /// True when a denominator trace measured zero, leaving a component
    /// undefined for this sample size.
    pub degenerate: bool,
}

fn ratio_with_error(num: &TraceEstimate, den: &TraceEstimate) -> (f64, f64) {
    if !(den.value.is_finite() && den.value > 0.0) {
        return (f64::NAN, f64::NAN);
    }
    let ratio = num.value / den.value;
    let variance = (num.std_error / den.value).powi(2)
        + (num.value * den.std_error / (den.value * den.value)).powi(2);
    (ratio, variance.sqrt())
}

/// Estimate the full gradient at every prefix of the shot grid.
pub fn estimate_gradient_prefixes(
    ds: &Dataset,
    w: &Weights,
    settings: EstimatorSettings,
    m_grid: &[u64],
    seed: u64,
) -> Result<Vec<QuantumGradient>> {
    validate_grid(m_grid)?;
    let points = m_grid.len();
    let mut gradients = vec![vec![0.0; w.len()]; points];
    let mut variances = vec![vec![0.0; w.len()]; points];
    let mut traces: Vec<Vec<ComponentTraces>> = vec![Vec::new(); points];
    let mut degenerate = vec![false; points];

    for (record_index, record) in ds.records().iter().enumerate() {
        let instance =
            QcrfInstance::new(record.table.clone(), w.clone(), record.labels.clone())?;
        let cfg = settings.config_for(record.table.positions(), w)?;
        for k in 0..w.len() {
            let run = |kind: TraceKind| {
                estimate_trace_prefixes(
                    &instance,
                    kind,
                    Some(k),
                    &cfg,
                    m_grid,
                    derive_seed(seed, &[record_index as u64, k as u64, kind.ordinal()]),
                )
            };
            let lxy_h0 = run(TraceKind::LxyH0)?;
            let lxy_dh0 = run(TraceKind::LxyDh0)?;
            let lx_hn = run(TraceKind::LxHn)?;
            let lx_dhn = run(TraceKind::LxDhn)?;
            for g in 0..points {
                let (clamped, clamped_se) = ratio_with_error(&lxy_dh0[g], &lxy_h0[g]);
                let (free, free_se) = ratio_with_error(&lx_dhn[g], &lx_hn[g]);
                if !(clamped.is_finite() && free.is_finite()) {
                    degenerate[g] = true;
                }
                gradients[g][k] -= record.weight * (clamped - free);
                variances[g][k] += (record.weight * record.weight)
                    * (clamped_se * clamped_se + free_se * free_se);
                traces[g].push(ComponentTraces {
                    record: record_index,
                    k,
                    lxy_h0: lxy_h0[g].clone(),
                    lxy_dh0: lxy_dh0[g].clone(),
                    lx_hn: lx_hn[g].clone(),
                    lx_dhn: lx_dhn[g].clone(),
                });
            }
        }
    }

    Ok((0..points)
        .map(|g| QuantumGradient {
            gradient: std::mem::take(&mut gradients[g]),
            std_error: variances[g].iter().map(|v| v.sqrt()).collect(),
            traces: std::mem::take(&mut traces[g]),
            degenerate: degenerate[g],
        })
        .collect())
}

/// Estimate the gradient with `m` copies per trace.
pub fn estimate_gradient(
    ds: &Dataset,
    w: &Weights,
    settings: EstimatorSettings,
    m: u64,
    seed: u64,
) -> Result<QuantumGradient> {
    Ok(estimate_gradient_prefixes(ds, w, settings, &[m], seed)?
        .pop()
        .expect("one grid point yields one gradient"))
}
