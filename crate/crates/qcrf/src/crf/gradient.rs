//! Gradient back-ends: naive enumeration, factorized exact, Gibbs sampling.
//!
//! All three estimate the same two-term gradient
//! ∂L/∂w_k = −Σ P_data(x,y) [ Σ_i f_k(x_i,y_i) − E_{y*~P(·|x)} Σ_i f_k(x_i,y*_i) ]:
//! the clamped term is exact everywhere, the back-ends differ in how the
//! model-expectation term is computed.

use super::prob::{log_sum_exp, node_score};
use super::types::{check_weights_table, Dataset, FeatureTable, Weights};
use crate::error::{QcrfError, Result};
use crate::seeding::derive_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Naive routines refuse label spaces larger than this.
pub const ENUMERATION_CAP: u128 = 1 << 20;

fn label_space_size(table: &FeatureTable) -> Result<u128> {
    let q = table.label_count() as u128;
    let states = q
        .checked_pow(table.positions() as u32)
        .ok_or(QcrfError::EnumerationTooLarge {
            states: u128::MAX,
            cap: ENUMERATION_CAP,
        })?;
    if states > ENUMERATION_CAP {
        return Err(QcrfError::EnumerationTooLarge {
            states,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(states)
}

/// Visit every labeling of `n` positions over `q` labels in mixed-radix
/// order (last position varies fastest).
pub(crate) fn for_each_labeling(n: usize, q: usize, mut visit: impl FnMut(&[usize])) {
    let mut labels = vec![0usize; n];
    loop {
        visit(&labels);
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            labels[pos] += 1;
            if labels[pos] < q {
                break;
            }
            labels[pos] = 0;
        }
    }
}

/// Clamped term Σ_i f_k(x_i, y_i) for every k.
fn clamped_term(table: &FeatureTable, labels: &[usize]) -> Vec<f64> {
    (0..table.feature_count())
        .map(|k| table.feature_sum(k, labels))
        .collect()
}

/// Per-position node scores s[i][j] = Σ_k w_k f_k(x_i, j).
fn node_scores(table: &FeatureTable, w: &Weights) -> Vec<Vec<f64>> {
    (0..table.positions())
        .map(|i| {
            (0..table.label_count())
                .map(|j| node_score(table, w, i, j))
                .collect()
        })
        .collect()
}

/// Model expectation by full enumeration over label sequences.
fn model_term_naive(table: &FeatureTable, w: &Weights) -> Result<Vec<f64>> {
    label_space_size(table)?;
    let scores = node_scores(table, w);
    let n = table.positions();
    let q = table.label_count();

    let mut potentials = Vec::new();
    for_each_labeling(n, q, |labels| {
        let e: f64 = labels.iter().enumerate().map(|(i, &j)| scores[i][j]).sum();
        potentials.push(e);
    });
    let log_z = log_sum_exp(potentials.iter().copied());

    let mut expectation = vec![0.0; table.feature_count()];
    let mut index = 0usize;
    for_each_labeling(n, q, |labels| {
        let p = (potentials[index] - log_z).exp();
        for (k, acc) in expectation.iter_mut().enumerate() {
            *acc += p * table.feature_sum(k, labels);
        }
        index += 1;
    });
    Ok(expectation)
}

/// Model expectation via the node factorization: with node features only,
/// positions are independent under P(·|x), so
/// E[Σ_i f_k] = Σ_i Σ_j P_i(j) f_k(x_i, j) in O(n·Q·K).
fn model_term_factorized(table: &FeatureTable, w: &Weights) -> Vec<f64> {
    let q = table.label_count();
    let mut expectation = vec![0.0; table.feature_count()];
    for i in 0..table.positions() {
        let scores: Vec<f64> = (0..q).map(|j| node_score(table, w, i, j)).collect();
        let log_norm = log_sum_exp(scores.iter().copied());
        for j in 0..q {
            let p = (scores[j] - log_norm).exp();
            for (k, acc) in expectation.iter_mut().enumerate() {
                *acc += p * table.signf(k, i, j);
            }
        }
    }
    expectation
}

fn assemble(
    ds: &Dataset,
    w: &Weights,
    mut model_term: impl FnMut(&FeatureTable, &Weights) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let mut gradient = vec![0.0; w.len()];
    for record in ds.records() {
        check_weights_table(w, &record.table)?;
        let clamped = clamped_term(&record.table, &record.labels);
        let model = model_term(&record.table, w)?;
        for k in 0..w.len() {
            gradient[k] -= record.weight * (clamped[k] - model[k]);
        }
    }
    Ok(gradient)
}

/// Exact gradient by full enumeration over Q^n labelings per record.
pub fn gradient_naive(ds: &Dataset, w: &Weights) -> Result<Vec<f64>> {
    assemble(ds, w, model_term_naive)
}

/// Exact gradient via the node factorization, O(N·n·Q·K).
pub fn gradient_factorized(ds: &Dataset, w: &Weights) -> Result<Vec<f64>> {
    assemble(ds, w, |t, w| Ok(model_term_factorized(t, w)))
}

/// Gibbs estimate with per-component standard errors.
#[derive(Debug, Clone)]
pub struct GibbsGradient {
    pub gradient: Vec<f64>,
    pub std_error: Vec<f64>,
    pub sweeps: usize,
}

/// Single-site Gibbs chain over label sequences for one record. Returns
/// per-sweep means and variances of the feature sums Σ_i f_k.
fn gibbs_model_term(
    table: &FeatureTable,
    w: &Weights,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let n = table.positions();
    let q = table.label_count();
    let k_count = table.feature_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = vec![0usize; n];

    // With node features the single-site conditional P(y_i = j | y_{-i})
    // reduces to the node softmax; we still resample site by site so the
    // chain stays a faithful Gibbs sweep.
    let mut conditionals = Vec::with_capacity(n);
    for i in 0..n {
        let scores: Vec<f64> = (0..q).map(|j| node_score(table, w, i, j)).collect();
        let log_norm = log_sum_exp(scores.iter().copied());
        conditionals.push(
            scores
                .iter()
                .map(|s| (s - log_norm).exp())
                .collect::<Vec<f64>>(),
        );
    }

    let sample_site = |rng: &mut ChaCha8Rng, i: usize| -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (j, p) in conditionals[i].iter().enumerate() {
            acc += p;
            if u < acc {
                return j;
            }
        }
        q - 1
    };

    let mut mean = vec![0.0; k_count];
    let mut m2 = vec![0.0; k_count];
    let mut count = 0usize;
    for sweep in 0..burn_in + sweeps {
        for i in 0..n {
            labels[i] = sample_site(&mut rng, i);
        }
        if sweep < burn_in {
            continue;
        }
        count += 1;
        for k in 0..k_count {
            let value = table.feature_sum(k, &labels);
            let delta = value - mean[k];
            mean[k] += delta / count as f64;
            m2[k] += delta * (value - mean[k]);
        }
    }
    let variance: Vec<f64> = m2
        .iter()
        .map(|v| if count > 1 { v / (count - 1) as f64 } else { 0.0 })
        .collect();
    (mean, variance)
}

/// Gibbs-sampled gradient with per-component standard errors.
///
/// The clamped term is exact; the model-expectation term is the Monte
/// Carlo mean over `sweeps` post-burn-in sweeps of a single-site chain.
/// Fully deterministic under a fixed seed.
pub fn gradient_gibbs_detailed(
    ds: &Dataset,
    w: &Weights,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<GibbsGradient> {
    if sweeps == 0 {
        return Err(QcrfError::InvalidInstance(
            "gibbs sampling needs at least one sweep".into(),
        ));
    }
    let mut gradient = vec![0.0; w.len()];
    let mut var = vec![0.0; w.len()];
    for (index, record) in ds.records().iter().enumerate() {
        check_weights_table(w, &record.table)?;
        let clamped = clamped_term(&record.table, &record.labels);
        let record_seed = derive_seed(seed, &[index as u64]);
        let (model, model_var) = gibbs_model_term(&record.table, w, sweeps, burn_in, record_seed);
        for k in 0..w.len() {
            gradient[k] -= record.weight * (clamped[k] - model[k]);
            var[k] += (record.weight * record.weight) * model_var[k] / sweeps as f64;
        }
    }
    Ok(GibbsGradient {
        gradient,
        std_error: var.iter().map(|v| v.sqrt()).collect(),
        sweeps,
    })
}

/// Gibbs-sampled gradient (estimate only).
pub fn gradient_gibbs(
    ds: &Dataset,
    w: &Weights,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    Ok(gradient_gibbs_detailed(ds, w, sweeps, burn_in, seed)?.gradient)
}

/// A gradient evaluator the trainer can drive.
///
/// Stochastic back-ends may advance an internal counter so that each
/// training iteration sees a fresh, still seed-deterministic, stream.
pub trait GradientBackend {
    fn gradient(&mut self, ds: &Dataset, w: &Weights) -> Result<Vec<f64>>;
    fn name(&self) -> &str;
}

/// Exact gradient by enumeration.
#[derive(Debug, Default)]
pub struct NaiveBackend;

impl GradientBackend for NaiveBackend {
    fn gradient(&mut self, ds: &Dataset, w: &Weights) -> Result<Vec<f64>> {
        gradient_naive(ds, w)
    }
    fn name(&self) -> &str {
        "naive"
    }
}

/// Exact gradient via the node factorization.
#[derive(Debug, Default)]
pub struct FactorizedBackend;

impl GradientBackend for FactorizedBackend {
    fn gradient(&mut self, ds: &Dataset, w: &Weights) -> Result<Vec<f64>> {
        gradient_factorized(ds, w)
    }
    fn name(&self) -> &str {
        "factorized"
    }
}

/// Gibbs-sampled gradient; each iteration derives a fresh chain seed.
#[derive(Debug)]
pub struct GibbsBackend {
    pub sweeps: usize,
    pub burn_in: usize,
    pub seed: u64,
    iteration: u64,
}

impl GibbsBackend {
    pub fn new(sweeps: usize, burn_in: usize, seed: u64) -> Self {
        Self {
            sweeps,
            burn_in,
            seed,
            iteration: 0,
        }
    }
}

impl GradientBackend for GibbsBackend {
    fn gradient(&mut self, ds: &Dataset, w: &Weights) -> Result<Vec<f64>> {
        let seed = derive_seed(self.seed, &[self.iteration]);
        self.iteration += 1;
        gradient_gibbs(ds, w, self.sweeps, self.burn_in, seed)
    }
    fn name(&self) -> &str {
        "gibbs"
    }
}
