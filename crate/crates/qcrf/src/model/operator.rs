//! Lazy diagonal operators and diagonal projectors.

use super::layout::RegisterLayout;
use crate::error::{QcrfError, Result};
use std::io::Write;
use std::sync::Arc;

/// Largest dimension the debug dump format accepts.
pub const DUMP_DIM_CAP: u64 = 1 << 12;

type EvalFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;
type IndicatorFn = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// A real diagonal operator evaluated lazily per basis index.
///
/// Diagonals are Hermitian by construction and compose pointwise; the
/// recorded `bound` is an upper bound on |entry| maintained through
/// composition so downstream consumers can size quantization windows
/// without scanning the full basis.
#[derive(Clone)]
pub struct DiagonalOperator {
    layout: RegisterLayout,
    eval: EvalFn,
    bound: f64,
}

impl std::fmt::Debug for DiagonalOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiagonalOperator")
            .field("layout", &self.layout)
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

impl DiagonalOperator {
    pub fn new(
        layout: RegisterLayout,
        bound: f64,
        eval: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            layout,
            eval: Arc::new(eval),
            bound,
        }
    }

    pub fn zero(layout: RegisterLayout) -> Self {
        Self::new(layout, 0.0, |_| 0.0)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    /// Upper bound on |entry| over the basis.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// The diagonal entry at a basis index.
    #[inline]
    pub fn entry(&self, index: u64) -> f64 {
        (self.eval)(index)
    }

    fn check_layout(&self, other: &Self) -> Result<()> {
        if self.layout != other.layout {
            return Err(QcrfError::InvalidInstance(
                "diagonal operators act on different layouts".into(),
            ));
        }
        Ok(())
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_layout(other)?;
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Ok(Self::new(self.layout, self.bound + other.bound, move |i| {
            a(i) + b(i)
        }))
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_layout(other)?;
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Ok(Self::new(self.layout, self.bound * other.bound, move |i| {
            a(i) * b(i)
        }))
    }

    /// Scalar multiple.
    pub fn scale(&self, c: f64) -> Self {
        let a = self.eval.clone();
        Self::new(self.layout, self.bound * c.abs(), move |i| c * a(i))
    }

    /// Pointwise exponential e^entry.
    pub fn exp(&self) -> Self {
        let a = self.eval.clone();
        Self::new(self.layout, self.bound.exp(), move |i| a(i).exp())
    }

    /// Nonnegative part max(entry, 0).
    pub fn positive_part(&self) -> Self {
        let a = self.eval.clone();
        Self::new(self.layout, self.bound, move |i| a(i).max(0.0))
    }

    /// Nonnegative part max(−entry, 0).
    pub fn negative_part(&self) -> Self {
        let a = self.eval.clone();
        Self::new(self.layout, self.bound, move |i| (-a(i)).max(0.0))
    }
}

/// A diagonal projector: a 0/1 indicator over basis indices plus the
/// explicit list of its support points.
#[derive(Clone)]
pub struct Projector {
    layout: RegisterLayout,
    indicator: IndicatorFn,
    support: Arc<Vec<u64>>,
}

impl std::fmt::Debug for Projector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Projector")
            .field("layout", &self.layout)
            .field("rank", &self.support.len())
            .finish_non_exhaustive()
    }
}

impl Projector {
    /// Build from an explicit support list; the indicator answers point
    /// queries consistently with the list.
    pub fn from_support(
        layout: RegisterLayout,
        support: Vec<u64>,
        indicator: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            layout,
            indicator: Arc::new(indicator),
            support: Arc::new(support),
        }
    }

    /// Build by scanning the basis for indicator hits. Only valid for
    /// layouts small enough to enumerate.
    pub fn from_indicator(
        layout: RegisterLayout,
        indicator: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        const SCAN_CAP: u64 = 1 << 24;
        if layout.dim() > SCAN_CAP {
            return Err(QcrfError::EnumerationTooLarge {
                states: layout.dim() as u128,
                cap: SCAN_CAP as u128,
            });
        }
        let support: Vec<u64> = (0..layout.dim()).filter(|&i| indicator(i)).collect();
        Ok(Self {
            layout,
            indicator: Arc::new(indicator),
            support: Arc::new(support),
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    /// Indicator value at a basis index.
    #[inline]
    pub fn contains(&self, index: u64) -> bool {
        (self.indicator)(index)
    }

    /// Number of basis states the projector selects.
    pub fn rank(&self) -> u64 {
        self.support.len() as u64
    }

    /// The support points, in increasing index order.
    pub fn support(&self) -> &[u64] {
        &self.support
    }
}

/// Debug dump: one `index<TAB>value` line per basis state, 17 significant
/// digits, for operators of dimension at most [`DUMP_DIM_CAP`].
pub fn dump_diagonal(op: &DiagonalOperator, mut out: impl Write) -> Result<()> {
    let dim = op.layout().dim();
    if dim > DUMP_DIM_CAP {
        return Err(QcrfError::EnumerationTooLarge {
            states: dim as u128,
            cap: DUMP_DIM_CAP as u128,
        });
    }
    for index in 0..dim {
        writeln!(
            out,
            "{index}\t{}",
            crate::crf::format_f64_17(op.entry(index))
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> RegisterLayout {
        RegisterLayout::clamped(2, 1, 2).unwrap()
    }

    #[test]
    fn composition_tracks_bounds() {
        let a = DiagonalOperator::new(layout(), 2.0, |i| i as f64 - 1.0);
        let b = DiagonalOperator::new(layout(), 3.0, |_| 3.0);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.entry(0), 2.0);
        assert_eq!(sum.bound(), 5.0);
        let prod = a.product(&b).unwrap();
        assert_eq!(prod.entry(2), 3.0);
        assert_eq!(prod.bound(), 6.0);
        let e = a.exp();
        assert_eq!(e.entry(3), 2.0f64.exp());
        assert_eq!(e.bound(), 2.0f64.exp());
    }

    #[test]
    fn sign_parts_reconstruct() {
        let a = DiagonalOperator::new(layout(), 2.0, |i| i as f64 - 1.5);
        let pos = a.positive_part();
        let neg = a.negative_part();
        for i in 0..4 {
            assert!(pos.entry(i) >= 0.0 && neg.entry(i) >= 0.0);
            assert_eq!(pos.entry(i).min(neg.entry(i)), 0.0);
            assert_eq!(pos.entry(i) - neg.entry(i), a.entry(i));
        }
    }

    #[test]
    fn projector_scan_matches_indicator() {
        let p = Projector::from_indicator(layout(), |i| i % 2 == 0).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.support(), &[0, 2]);
        // Idempotence is structural: the indicator is boolean.
        for i in 0..4 {
            assert_eq!(p.contains(i) && p.contains(i), p.contains(i));
        }
    }

    #[test]
    fn dump_has_one_line_per_state() {
        let op = DiagonalOperator::new(layout(), 1.0, |i| i as f64);
        let mut buffer = Vec::new();
        dump_diagonal(&op, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], "2\t2.0000000000000000e0");
    }
}
