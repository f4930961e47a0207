//! Dense linear-algebra helpers: nullspaces of sparse constraint systems,
//! orthonormalization with a rank cut, and principal angles.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::C64;

/// Orthonormal basis of a nullspace together with the singular values around
/// the cut, so callers can report the spectral gap.
#[derive(Debug, Clone)]
pub struct Null {
    pub basis: DMatrix<C64>,
    /// Largest singular value classified as zero.
    pub sigma_null_max: f64,
    /// Smallest singular value classified as nonzero (`inf` if none).
    pub sigma_rest_min: f64,
    pub sigma_max: f64,
}

impl Null {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Smallest retained singular value relative to the largest one.
    pub fn gap(&self) -> f64 {
        if self.sigma_max == 0.0 || !self.sigma_rest_min.is_finite() {
            f64::INFINITY
        } else {
            self.sigma_rest_min / self.sigma_max
        }
    }
}

/// Accumulator for the Gram matrix `A* A` of a constraint matrix given row by
/// row.
#[derive(Debug, Clone)]
pub struct Gram {
    g: DMatrix<C64>,
}

impl Gram {
    pub fn new(n: usize) -> Self {
        Self { g: DMatrix::zeros(n, n) }
    }

    /// Wraps an already assembled Hermitian Gram matrix.
    pub fn from_matrix(g: DMatrix<C64>) -> Self {
        assert_eq!(g.nrows(), g.ncols());
        Self { g }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn add_row(&mut self, row: &[(usize, C64)]) {
        for &(i, a) in row {
            let ac = a.conj();
            for &(j, b) in row {
                self.g[(i, j)] += ac * b;
            }
        }
    }

    /// Adds `A* A` for a dense block of rows.
    pub fn add_dense(&mut self, a: &DMatrix<C64>) {
        self.g += a.adjoint() * a;
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.g
    }

    /// Nullspace with singular values below `rel_tol * sigma_max` treated as zero.
    pub fn nullspace(&self, rel_tol: f64) -> Null {
        let (vals, vecs) = hermitian_eigen(&self.g);
        let n = vals.len();
        let sig: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
        let sigma_max = sig.iter().cloned().fold(0.0, f64::max);
        let cut = rel_tol * sigma_max;
        let mut null_cols = Vec::new();
        let mut null_max: f64 = 0.0;
        let mut rest_min = f64::INFINITY;
        for i in 0..n {
            if sig[i] <= cut || sigma_max == 0.0 {
                null_cols.push(i);
                null_max = null_max.max(sig[i]);
            } else {
                rest_min = rest_min.min(sig[i]);
            }
        }
        let mut basis = DMatrix::zeros(n, null_cols.len());
        for (k, &i) in null_cols.iter().enumerate() {
            basis.set_column(k, &vecs.column(i));
        }
        Null { basis, sigma_null_max: null_max, sigma_rest_min: rest_min, sigma_max }
    }
}

/// Eigen-decomposition of a Hermitian matrix, using the real solver when the
/// matrix has no imaginary part.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    if n == 0 {
        return (vec![], DMatrix::zeros(0, 0));
    }
    if h.iter().all(|c| c.im == 0.0) {
        let re = h.map(|c| c.re);
        let re = (&re + re.transpose()) * 0.5;
        let e = SymmetricEigen::new(re);
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
        let e = SymmetricEigen::new(herm);
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    }
}

/// Orthonormal basis of the column span, discarding directions with singular
/// value below `rel_tol * sigma_max` (and everything if `sigma_max < 1e-13`).
pub fn orthonormalize(a: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    let (rows, cols) = a.shape();
    if cols == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    if rows >= 4 * cols {
        // cheaper route for tall matrices: eigenvectors of the small Gram matrix
        let g = a.adjoint() * a;
        let (vals, vecs) = hermitian_eigen(&g);
        let smax = vals.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt();
        if smax < 1e-13 {
            return DMatrix::zeros(rows, 0);
        }
        let keep: Vec<usize> = (0..cols).filter(|&i| vals[i].max(0.0).sqrt() > rel_tol * smax).collect();
        let mut q = DMatrix::zeros(rows, keep.len());
        for (k, &i) in keep.iter().enumerate() {
            let v = a * vecs.column(i);
            let nv = v.norm();
            q.set_column(k, &(v / C64::new(nv, 0.0)));
        }
        // one pass of re-orthogonalization against the squared condition number
        return reorthonormalize(q);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax < 1e-13 {
        return DMatrix::zeros(rows, 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > rel_tol * smax).collect();
    let mut q = DMatrix::zeros(rows, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        q.set_column(k, &u.column(i));
    }
    q
}

fn reorthonormalize(mut q: DMatrix<C64>) -> DMatrix<C64> {
    for j in 0..q.ncols() {
        for i in 0..j {
            let qi = q.column(i).clone_owned();
            let c = qi.dotc(&q.column(j));
            let mut cj = q.column_mut(j);
            cj -= qi * c;
        }
        let n = q.column(j).norm();
        q.column_mut(j).unscale_mut(n);
    }
    q
}

/// Sine of the largest principal angle by which `span(b)` leaves `span(a)`,
/// for orthonormal frames `a` and `b`.
pub fn max_angle_sin(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if b.ncols() == 0 {
        return 0.0;
    }
    let r = b - a * (a.adjoint() * b);
    r.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// `max_j |(Q* Q - I)_{ij}|` for a frame `Q`.
pub fn orthonormality_error(q: &DMatrix<C64>) -> f64 {
    let g = q.adjoint() * q;
    let n = g.nrows();
    let mut e: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            e = e.max((g[(i, j)] - C64::new(want, 0.0)).norm());
        }
    }
    e
}

pub fn to_dvector(v: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_simple_system() {
        // x0 - x1 = 0, x2 = 0 in C^3
        let mut g = Gram::new(3);
        g.add_row(&[(0, C64::new(1.0, 0.0)), (1, C64::new(-1.0, 0.0))]);
        g.add_row(&[(2, C64::new(2.0, 0.0))]);
        let n = g.nullspace(1e-8);
        assert_eq!(n.dim(), 1);
        let v = n.basis.column(0);
        assert!((v[0] - v[1]).norm() < 1e-12 && v[2].norm() < 1e-12);
        assert!(n.gap() > 0.1);
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let a = DMatrix::from_fn(5, 3, |i, j| C64::new((i + j) as f64, if j == 2 { 0.0 } else { 1.0 }));
        let mut b = a.clone();
        let extra = a.column(0) + a.column(1);
        b = b.insert_column(3, C64::new(0.0, 0.0));
        b.set_column(3, &extra);
        let q = orthonormalize(&b, 1e-10);
        assert_eq!(q.ncols(), orthonormalize(&a, 1e-10).ncols());
        assert!(orthonormality_error(&q) < 1e-12);
        let tall = DMatrix::from_fn(40, 3, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64, 0.0));
        let qt = orthonormalize(&tall, 1e-10);
        assert!(orthonormality_error(&qt) < 1e-12);
        assert!(max_angle_sin(&qt, &orthonormalize(&tall.columns(0, 2).clone_owned(), 1e-10)) < 1e-10);
    }
}
