//! Ready-made feature tables and weight vectors for experiments and tests.

use crate::crf::{Dataset, FeatureTable, Weights};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The weight vector of the 1024-dimensional reference study.
pub const PAPER_WEIGHTS: [f64; 5] = [0.17, 0.35, 0.41, 0.52, 0.37];

/// Table where label 0 scores +1 on every feature at every position and
/// every other label scores −1. Training data labeled all-zero is then
/// perfectly separable.
pub fn aligned_table(n: usize, k: usize, q: usize) -> FeatureTable {
    let mut signs = Vec::with_capacity(n * k * q);
    for _ in 0..k {
        for _ in 0..n {
            for j in 0..q {
                signs.push(if j == 0 { 1 } else { -1 });
            }
        }
    }
    FeatureTable::from_signs(n, k, q, signs).expect("aligned table dimensions are positive")
}

/// Uniformly random ±1 feature table, reproducible from the seed.
pub fn random_table(n: usize, k: usize, q: usize, seed: u64) -> FeatureTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signs = (0..n * k * q)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    FeatureTable::from_signs(n, k, q, signs).expect("random table dimensions are positive")
}

/// Random weights drawn uniformly from [-scale, scale].
pub fn random_weights(k: usize, scale: f64, eta: f64, seed: u64) -> Result<Weights> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Weights::new(
        (0..k).map(|_| rng.random_range(-scale..=scale)).collect(),
        eta,
    )
}

/// A random labeled instance: feature table, gold labeling and weights.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub table: FeatureTable,
    pub labels: Vec<usize>,
    pub weights: Weights,
}

impl RandomInstance {
    pub fn dataset(&self) -> Dataset {
        Dataset::single(self.table.clone(), self.labels.clone())
            .expect("single-record dataset is valid")
    }
}

/// Sample a random instance with dimensions bounded so that the free-mode
/// register dimension Q^n · 2^(nK) stays within `dim_cap`.
pub fn sample_instance(seed: u64, dim_cap: u128) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(1..=4usize);
        let k = rng.random_range(1..=5usize);
        let q = rng.random_range(2..=4usize);
        let dim = (q as u128).pow(n as u32) * (1u128 << (n * k));
        if dim > dim_cap {
            continue;
        }
        let table_seed = rng.random::<u64>();
        let weight_seed = rng.random::<u64>();
        let table = random_table(n, k, q, table_seed);
        let labels = (0..n).map(|_| rng.random_range(0..q)).collect();
        let weights = random_weights(k, 1.0, 0.1, weight_seed).expect("finite random weights");
        return RandomInstance {
            table,
            labels,
            weights,
        };
    }
}

/// The 1024-entry reference instance: n=2, K=5, Q=2 with the fixed
/// weight vector [`PAPER_WEIGHTS`] and a seeded random feature table.
pub fn paper_scale_instance(table_seed: u64) -> RandomInstance {
    let table = random_table(2, 5, 2, table_seed);
    let weights = Weights::new(PAPER_WEIGHTS.to_vec(), 0.1).expect("paper weights are finite");
    RandomInstance {
        table,
        labels: vec![0, 0],
        weights,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_table_signs() {
        let t = aligned_table(2, 3, 3);
        for k in 0..3 {
            for i in 0..2 {
                assert_eq!(t.sign(k, i, 0), 1);
                assert_eq!(t.sign(k, i, 1), -1);
                assert_eq!(t.sign(k, i, 2), -1);
            }
        }
    }

    #[test]
    fn random_table_is_seed_deterministic() {
        assert_eq!(random_table(3, 2, 2, 9), random_table(3, 2, 2, 9));
        assert_ne!(random_table(3, 2, 2, 9), random_table(3, 2, 2, 10));
    }

    #[test]
    fn sampled_instances_respect_cap() {
        for seed in 0..50 {
            let inst = sample_instance(seed, 1 << 16);
            let n = inst.table.positions();
            let k = inst.table.feature_count();
            let q = inst.table.label_count();
            let dim = (q as u128).pow(n as u32) * (1u128 << (n * k));
            assert!(dim <= 1 << 16);
            assert_eq!(inst.weights.len(), k);
        }
    }
}
