//! Domain types for the classical CRF layer.

use crate::error::{QcrfError, Result};

/// Ordered alphabet of distinct label tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAlphabet {
    labels: Vec<String>,
}

impl LabelAlphabet {
    /// Build an alphabet from label tokens. Requires at least two distinct
    /// tokens and rejects duplicates.
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(QcrfError::InvalidInstance(format!(
                "label alphabet needs at least 2 tokens, got {}",
                labels.len()
            )));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(QcrfError::InvalidInstance(format!(
                    "duplicate label token {a:?}"
                )));
            }
        }
        Ok(Self { labels })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.labels.iter().position(|t| t == token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.labels
    }
}

/// An observation sequence with optional labels of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    observations: Vec<String>,
    labels: Option<Vec<usize>>,
}

impl Sequence {
    pub fn new<S: Into<String>>(
        observations: impl IntoIterator<Item = S>,
        labels: Option<Vec<usize>>,
        alphabet: &LabelAlphabet,
    ) -> Result<Self> {
        let observations: Vec<String> = observations.into_iter().map(Into::into).collect();
        if observations.is_empty() {
            return Err(QcrfError::InvalidInstance(
                "sequence must have at least one observation".into(),
            ));
        }
        if let Some(ref ls) = labels {
            if ls.len() != observations.len() {
                return Err(QcrfError::DimensionMismatch {
                    what: "sequence labels",
                    expected: observations.len(),
                    actual: ls.len(),
                });
            }
            for &l in ls {
                if l >= alphabet.size() {
                    return Err(QcrfError::LabelOutOfRange {
                        label: l,
                        q: alphabet.size(),
                    });
                }
            }
        }
        Ok(Self {
            observations,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self) -> &[String] {
        &self.observations
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }
}

/// The ±1 feature values `f_k(x_i, y_i)` materialized over all features
/// `k`, positions `i` and candidate labels, for one observation sequence.
///
/// Entries are stored feature-major: `(k, i)` pairs each hold `q` signs,
/// one per candidate label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureTable {
    n: usize,
    k: usize,
    q: usize,
    /// signs[(k * n + i) * q + j] ∈ {-1, +1}
    signs: Vec<i8>,
}

impl FeatureTable {
    /// Build a table from raw signs laid out feature-major, position-minor,
    /// label-innermost. Every entry must be exactly −1 or +1.
    pub fn from_signs(n: usize, k: usize, q: usize, signs: Vec<i8>) -> Result<Self> {
        if n == 0 || k == 0 || q == 0 {
            return Err(QcrfError::InvalidInstance(format!(
                "feature table dimensions must be positive (n={n}, K={k}, Q={q})"
            )));
        }
        if signs.len() != n * k * q {
            return Err(QcrfError::DimensionMismatch {
                what: "feature table signs",
                expected: n * k * q,
                actual: signs.len(),
            });
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(QcrfError::InvalidInstance(format!(
                "feature sign must be -1 or +1, got {bad}"
            )));
        }
        Ok(Self { n, k, q, signs })
    }

    /// Indicator-template construction: feature `k` is the pair
    /// `(token, label)` and scores +1 exactly when the observation at a
    /// position equals `token` and the candidate label equals `label`.
    pub fn from_templates(
        sequence: &Sequence,
        alphabet: &LabelAlphabet,
        templates: &[(String, String)],
    ) -> Result<Self> {
        if templates.is_empty() {
            return Err(QcrfError::InvalidInstance(
                "at least one feature template required".into(),
            ));
        }
        let n = sequence.len();
        let q = alphabet.size();
        let k = templates.len();
        let mut signs = Vec::with_capacity(n * k * q);
        for (token, label) in templates {
            let label_idx = alphabet.index_of(label).ok_or_else(|| {
                QcrfError::InvalidInstance(format!("template label {label:?} not in alphabet"))
            })?;
            for i in 0..n {
                let obs_match = sequence.observations()[i] == *token;
                for j in 0..q {
                    let hit = obs_match && j == label_idx;
                    signs.push(if hit { 1 } else { -1 });
                }
            }
        }
        Self::from_signs(n, k, q, signs)
    }

    pub fn positions(&self) -> usize {
        self.n
    }

    pub fn feature_count(&self) -> usize {
        self.k
    }

    pub fn label_count(&self) -> usize {
        self.q
    }

    /// The sign f_k(x_i, y_i = j) as ±1.
    #[inline]
    pub fn sign(&self, k: usize, i: usize, j: usize) -> i8 {
        debug_assert!(k < self.k && i < self.n && j < self.q);
        self.signs[(k * self.n + i) * self.q + j]
    }

    /// Same as [`sign`](Self::sign) but as f64 for accumulation loops.
    #[inline]
    pub fn signf(&self, k: usize, i: usize, j: usize) -> f64 {
        f64::from(self.sign(k, i, j))
    }

    /// Sum of f_k over positions for a full labeling: Σ_i f_k(x_i, y_i).
    pub fn feature_sum(&self, k: usize, labels: &[usize]) -> f64 {
        labels
            .iter()
            .enumerate()
            .map(|(i, &j)| self.signf(k, i, j))
            .sum()
    }

    /// Append one feature that is +1 for every (position, label). Used by
    /// the shift-invariance tests: it adds a constant to every potential.
    pub fn with_constant_feature(&self) -> Self {
        let mut signs = self.signs.clone();
        signs.extend(std::iter::repeat(1).take(self.n * self.q));
        Self {
            n: self.n,
            k: self.k + 1,
            q: self.q,
            signs,
        }
    }
}

/// Boltzmann weight vector plus the gradient-descent step length.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    w: Vec<f64>,
    eta: f64,
}

impl Weights {
    pub fn new(w: Vec<f64>, eta: f64) -> Result<Self> {
        if w.is_empty() {
            return Err(QcrfError::InvalidInstance("empty weight vector".into()));
        }
        if let Some(bad) = w.iter().find(|x| !x.is_finite()) {
            return Err(QcrfError::InvalidInstance(format!(
                "weight entries must be finite, got {bad}"
            )));
        }
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(QcrfError::InvalidInstance(format!(
                "step length eta must be finite and nonnegative, got {eta}"
            )));
        }
        Ok(Self { w, eta })
    }

    pub fn zeros(k: usize, eta: f64) -> Result<Self> {
        Self::new(vec![0.0; k], eta)
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Sum of |w_k|; bounds the spectrum of the diagonal Hamiltonians.
    pub fn abs_sum(&self) -> f64 {
        self.w.iter().map(|x| x.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.w.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Gradient-descent step: w ← w − η g.
    pub fn step(&self, gradient: &[f64]) -> Result<Self> {
        if gradient.len() != self.w.len() {
            return Err(QcrfError::DimensionMismatch {
                what: "gradient",
                expected: self.w.len(),
                actual: gradient.len(),
            });
        }
        let w = self
            .w
            .iter()
            .zip(gradient)
            .map(|(w, g)| w - self.eta * g)
            .collect();
        Self::new(w, self.eta)
    }

    /// Scale every weight by `c`, keeping η.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.w.iter().map(|x| x * c).collect(), self.eta)
    }

    fn check_table(&self, table: &FeatureTable) -> Result<()> {
        if self.w.len() != table.feature_count() {
            return Err(QcrfError::DimensionMismatch {
                what: "weights vs feature table",
                expected: table.feature_count(),
                actual: self.w.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_weights_table(w: &Weights, table: &FeatureTable) -> Result<()> {
    w.check_table(table)
}

pub(crate) fn check_labeling(table: &FeatureTable, y: &[usize]) -> Result<()> {
    if y.len() != table.positions() {
        return Err(QcrfError::DimensionMismatch {
            what: "labeling",
            expected: table.positions(),
            actual: y.len(),
        });
    }
    for &j in y {
        if j >= table.label_count() {
            return Err(QcrfError::LabelOutOfRange {
                label: j,
                q: table.label_count(),
            });
        }
    }
    Ok(())
}

/// One labeled training sequence, materialized as its feature table, the
/// gold labeling and the empirical joint weight.
#[derive(Debug, Clone)]
pub struct DataRecord {
    pub table: FeatureTable,
    pub labels: Vec<usize>,
    pub weight: f64,
}

impl DataRecord {
    pub fn new(table: FeatureTable, labels: Vec<usize>, weight: f64) -> Result<Self> {
        check_labeling(&table, &labels)?;
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(QcrfError::InvalidInstance(format!(
                "empirical weight must lie in (0, 1], got {weight}"
            )));
        }
        Ok(Self {
            table,
            labels,
            weight,
        })
    }
}

/// A weighted set of labeled records sharing K and Q.
#[derive(Debug, Clone)]
pub struct Dataset {
    records: Vec<DataRecord>,
}

impl Dataset {
    pub fn new(records: Vec<DataRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(QcrfError::InvalidInstance("empty dataset".into()));
        }
        let k = records[0].table.feature_count();
        let q = records[0].table.label_count();
        for r in &records {
            if r.table.feature_count() != k || r.table.label_count() != q {
                return Err(QcrfError::InvalidInstance(format!(
                    "all records must share K and Q (expected K={k}, Q={q}, got K={}, Q={})",
                    r.table.feature_count(),
                    r.table.label_count()
                )));
            }
        }
        let total: f64 = records.iter().map(|r| r.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(QcrfError::InvalidInstance(format!(
                "empirical weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(Self { records })
    }

    /// Single record carrying all of the empirical mass.
    pub fn single(table: FeatureTable, labels: Vec<usize>) -> Result<Self> {
        Self::new(vec![DataRecord::new(table, labels, 1.0)?])
    }

    pub fn records(&self) -> &[DataRecord] {
        &self.records
    }

    pub fn feature_count(&self) -> usize {
        self.records[0].table.feature_count()
    }

    pub fn label_count(&self) -> usize {
        self.records[0].table.label_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_singletons() {
        assert!(LabelAlphabet::new(["a", "b"]).is_ok());
        assert!(LabelAlphabet::new(["a"]).is_err());
        assert!(LabelAlphabet::new(["a", "a"]).is_err());
    }

    #[test]
    fn sequence_label_length_must_match() {
        let ab = LabelAlphabet::new(["a", "b"]).unwrap();
        assert!(Sequence::new(["x", "y"], Some(vec![0, 1]), &ab).is_ok());
        assert!(Sequence::new(["x", "y"], Some(vec![0]), &ab).is_err());
        assert!(Sequence::new(["x"], Some(vec![2]), &ab).is_err());
        assert!(Sequence::new(Vec::<String>::new(), None, &ab).is_err());
    }

    #[test]
    fn table_rejects_bad_signs() {
        assert!(FeatureTable::from_signs(1, 1, 2, vec![1, -1]).is_ok());
        assert!(FeatureTable::from_signs(1, 1, 2, vec![1, 0]).is_err());
        assert!(FeatureTable::from_signs(1, 1, 2, vec![1]).is_err());
    }

    #[test]
    fn template_features_mark_matches() {
        let ab = LabelAlphabet::new(["N", "V"]).unwrap();
        let seq = Sequence::new(["dog", "runs"], Some(vec![0, 1]), &ab).unwrap();
        let table = FeatureTable::from_templates(
            &seq,
            &ab,
            &[("dog".into(), "N".into()), ("runs".into(), "V".into())],
        )
        .unwrap();
        assert_eq!(table.sign(0, 0, 0), 1); // dog==dog, label N
        assert_eq!(table.sign(0, 0, 1), -1); // dog==dog, label V
        assert_eq!(table.sign(0, 1, 0), -1); // runs!=dog
        assert_eq!(table.sign(1, 1, 1), 1); // runs==runs, label V
    }

    #[test]
    fn dataset_weights_must_sum_to_one() {
        let table = FeatureTable::from_signs(1, 1, 2, vec![1, -1]).unwrap();
        let r = |w| DataRecord::new(table.clone(), vec![0], w).unwrap();
        assert!(Dataset::new(vec![r(0.5), r(0.5)]).is_ok());
        assert!(Dataset::new(vec![r(0.5), r(0.6)]).is_err());
        assert!(DataRecord::new(table.clone(), vec![0], 0.0).is_err());
    }

    #[test]
    fn constant_feature_is_all_ones() {
        let table = FeatureTable::from_signs(2, 1, 2, vec![1, -1, -1, 1]).unwrap();
        let ext = table.with_constant_feature();
        assert_eq!(ext.feature_count(), 2);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(ext.sign(1, i, j), 1);
                assert_eq!(ext.sign(0, i, j), table.sign(0, i, j));
            }
        }
    }
}
