//! Compressed sparse row matrices over the complex numbers.

use nalgebra::DMatrix;
use std::collections::BTreeMap;

use crate::C64;

/// Sparse complex matrix in CSR layout.
///
/// Operators built by truncating an unbounded operator may carry a `spill`
/// vector: `spill[c]` is the squared norm of the part of column `c` that was
/// dropped. The images of distinct columns that were dropped are orthogonal
/// for every primitive operator built in [`crate::fock`], so the leakage of a
/// vector `x` is `sqrt(sum |x_c|^2 spill[c])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
    spill: Option<Vec<f64>>,
}

impl SparseOp {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates
    /// and dropping exact zeros.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut per_row: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            *per_row[r].entry(c).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for row in per_row {
            for (c, v) in row {
                if v != C64::new(0.0, 0.0) {
                    indices.push(c);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { rows, cols, indptr, indices, data, spill: None }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, indptr: vec![0; rows + 1], indices: vec![], data: vec![], spill: None }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))))
    }

    pub fn from_dense(m: &DMatrix<C64>, tol: f64) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].norm() > tol {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn with_spill(mut self, spill: Vec<f64>) -> Self {
        assert_eq!(spill.len(), self.cols);
        self.spill = Some(spill);
        self
    }

    pub fn spill(&self) -> Option<&[f64]> {
        self.spill.as_deref()
    }

    /// Norm of the component dropped by truncation when applying to `x`.
    pub fn leakage(&self, x: &[C64]) -> f64 {
        match &self.spill {
            None => 0.0,
            Some(s) => x.iter().zip(s).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[a..b].iter().copied().zip(self.data[a..b].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r).find(|&(j, _)| j == c).map(|(_, v)| v).unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "apply: vector length {} vs {} columns", x.len(), self.cols);
        (0..self.rows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn adjoint(&self) -> SparseOp {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn transpose(&self) -> SparseOp {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn conj(&self) -> SparseOp {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = v.conj());
        out.spill = None;
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseOp) -> SparseOp {
        assert_eq!(self.cols, other.rows, "mul: {}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols);
        let mut t = Vec::new();
        for r in 0..self.rows {
            let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    *acc.entry(c).or_insert(C64::new(0.0, 0.0)) += a * b;
                }
            }
            t.extend(acc.into_iter().map(|(c, v)| (r, c, v)));
        }
        Self::from_triplets(self.rows, other.cols, t)
    }

    pub fn add(&self, other: &SparseOp) -> SparseOp {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SparseOp) -> SparseOp {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: C64, other: &SparseOp, b: C64) -> SparseOp {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let t = self.triplets().map(|(r, c, v)| (r, c, a * v)).chain(other.triplets().map(|(r, c, v)| (r, c, b * v)));
        Self::from_triplets(self.rows, self.cols, t.collect::<Vec<_>>())
    }

    pub fn scale(&self, a: C64) -> SparseOp {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= a);
        if let Some(s) = out.spill.as_mut() {
            s.iter_mut().for_each(|w| *w *= a.norm_sqr());
        }
        out
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseOp {
        let mut col_pos = vec![usize::MAX; self.cols];
        for (i, &c) in cols.iter().enumerate() {
            col_pos[c] = i;
        }
        let mut t = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_pos[c] != usize::MAX {
                    t.push((i, col_pos[c], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), t)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|v| v.im == 0.0)
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn distance(&self, other: &SparseOp) -> f64 {
        self.sub(other).frobenius()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_matches_dense() {
        let a = SparseOp::from_triplets(2, 3, vec![(0, 0, c(1.0, 1.0)), (1, 2, c(2.0, 0.0)), (0, 2, c(0.0, -1.0))]);
        let b = SparseOp::from_triplets(3, 2, vec![(0, 1, c(3.0, 0.0)), (2, 0, c(1.0, 2.0))]);
        let want = a.to_dense() * b.to_dense();
        assert!((a.mul(&b).to_dense() - want).norm() < 1e-14);
        assert!((a.adjoint().to_dense() - a.to_dense().adjoint()).norm() < 1e-14);
    }

    #[test]
    fn duplicates_are_summed() {
        let a = SparseOp::from_triplets(1, 1, vec![(0, 0, c(1.0, 0.0)), (0, 0, c(-1.0, 0.0))]);
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn leakage_uses_spill() {
        let a = SparseOp::zero(1, 2).with_spill(vec![0.0, 4.0]);
        assert!((a.leakage(&[c(1.0, 0.0), c(0.0, 1.0)]) - 2.0).abs() < 1e-15);
    }
}
