use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::space::InteriorProjector;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sparse complex matrix on a [`ModeSpace`](super::ModeSpace) basis.
///
/// Entries are kept in row-major `BTreeMap` order so every traversal (and
/// therefore every floating-point accumulation) is deterministic. Exact
/// zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: (0..dim)
                .map(|i| ((i, i), Complex64::new(1.0, 0.0)))
                .collect(),
        }
    }

    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), Complex64)>,
    {
        let mut m = Self::zeros(dim);
        for ((row, col), v) in entries {
            if row >= dim || col >= dim {
                return Err(Error::InvalidEntry {
                    row,
                    col,
                    reason: format!("index outside dimension {dim}"),
                });
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidEntry {
                    row,
                    col,
                    reason: "non-finite amplitude".into(),
                });
            }
            m.accumulate(row, col, v);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or(ZERO)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.entries.values().all(|v| v.im == 0.0)
    }

    fn accumulate(&mut self, row: usize, col: usize, v: Complex64) {
        let slot = self.entries.entry((row, col)).or_insert(ZERO);
        *slot += v;
        if *slot == ZERO {
            self.entries.remove(&(row, col));
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((c, r), v.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::zeros(self.dim);
        for (&(r, c), &v) in &self.entries {
            out.accumulate(r, c, v * factor);
        }
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (&(r, c), &v) in &other.entries {
            out.accumulate(r, c, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (&(r, c), &v) in &other.entries {
            out.accumulate(r, c, -v);
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.dim];
        for (&(r, c), &v) in &other.entries {
            rows[r].push((c, v));
        }
        let mut out = Self::zeros(self.dim);
        for (&(i, k), &a) in &self.entries {
            for &(j, b) in &rows[k] {
                out.accumulate(i, j, a * b);
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let mut out = vec![ZERO; self.dim];
        for (&(r, c), &a) in &self.entries {
            out[r] += a * v[c];
        }
        Ok(out)
    }

    /// Column `col` as a sparse list of `(row, amplitude)`.
    pub fn column(&self, col: usize) -> Vec<(usize, Complex64)> {
        self.entries
            .iter()
            .filter(|(&(_, c), _)| c == col)
            .map(|(&(r, _), &v)| (r, v))
            .collect()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self
            .sub(other)?
            .entries
            .values()
            .fold(0.0, |acc, v| acc.max(v.norm())))
    }

    /// Largest `|A_ij − δ_ij|` over `i, j` in the projector's kept indices.
    pub fn interior_identity_deviation(&self, projector: &InteriorProjector) -> f64 {
        let mut worst: f64 = 0.0;
        for &i in projector.kept_indices() {
            worst = worst.max((self.get(i, i) - Complex64::new(1.0, 0.0)).norm());
        }
        for (&(r, c), v) in &self.entries {
            if r != c && projector.contains(r) && projector.contains(c) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Largest `|A_ij|` over `i, j` in the projector's kept indices.
    pub fn interior_max_abs(&self, projector: &InteriorProjector) -> f64 {
        self.entries
            .iter()
            .filter(|(&(r, c), _)| projector.contains(r) && projector.contains(c))
            .fold(0.0, |acc, (_, v)| acc.max(v.norm()))
    }

    /// Dense copy, for `dim` up to a few thousand.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (&(r, c), &v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> OperatorMatrix {
        OperatorMatrix::from_entries(
            3,
            [
                ((0, 1), c(1.0, 2.0)),
                ((2, 0), c(-0.5, 0.0)),
                ((1, 1), c(0.0, 3.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(OperatorMatrix::from_entries(2, [((2, 0), c(1.0, 0.0))]).is_err());
        assert!(OperatorMatrix::from_entries(2, [((0, 0), c(f64::NAN, 0.0))]).is_err());
    }

    #[test]
    fn adjoint_is_involution() {
        let a = sample();
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(a.adjoint().get(1, 0), c(1.0, -2.0));
    }

    #[test]
    fn self_and_identity_commute() {
        let a = sample();
        assert!(commutator(&a, &a).unwrap().is_zero());
        assert!(commutator(&OperatorMatrix::identity(3), &a)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn matmul_matches_dense() {
        let a = sample();
        let b = a.adjoint().add(&OperatorMatrix::identity(3)).unwrap();
        let sparse = a.matmul(&b).unwrap().to_dense();
        let dense = a.to_dense() * b.to_dense();
        assert!((sparse - dense).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = OperatorMatrix::identity(2);
        let b = OperatorMatrix::identity(3);
        assert!(matches!(a.matmul(&b), Err(Error::DimensionMismatch { .. })));
        assert!(commutator(&a, &b).is_err());
        assert!(a.apply(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn cancellation_removes_entries() {
        let a = sample();
        assert!(a.sub(&a).unwrap().is_zero());
    }
}
