//! Finite-dimensional operator algebras: generated algebras, commutants,
//! intertwiner spaces and the GNS data of a vector state.

use nalgebra::{DMatrix, DVector};

use crate::error::{dimension, Result};
use crate::fock::AntiLinear;
use crate::linalg::{max_angle_sin, orthonormalize, orthonormality_error, Gram};
use crate::sparse::SparseOp;
use crate::{Error, C64, RANK_TOL};

/// Linear subspace of `C^N` given by an orthonormal frame.
#[derive(Debug, Clone)]
pub struct Subspace {
    frame: DMatrix<C64>,
    /// Relative spectral gap of the computation that produced the subspace,
    /// `inf` when it was built from an explicit spanning set.
    pub gap: f64,
}

impl Subspace {
    pub fn from_orthonormal(frame: DMatrix<C64>) -> Self {
        Self { frame, gap: f64::INFINITY }
    }

    pub fn span(vectors: &DMatrix<C64>) -> Self {
        Self::from_orthonormal(orthonormalize(vectors, RANK_TOL))
    }

    pub fn span_vecs(ambient: usize, vectors: &[Vec<C64>]) -> Self {
        let mut m = DMatrix::zeros(ambient, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            assert_eq!(v.len(), ambient);
            m.set_column(j, &DVector::from_column_slice(v));
        }
        Self::span(&m)
    }

    pub fn zero(ambient: usize) -> Self {
        Self::from_orthonormal(DMatrix::zeros(ambient, 0))
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_orthonormal(DMatrix::identity(ambient, ambient))
    }

    pub fn ambient(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &DMatrix<C64> {
        &self.frame
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.frame.column(i).iter().copied().collect()
    }

    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let x = DVector::from_column_slice(v);
        let p = &self.frame * (self.frame.adjoint() * x);
        p.iter().copied().collect()
    }

    /// Distance from `v` to the subspace.
    pub fn residual(&self, v: &[C64]) -> f64 {
        let p = self.project(v);
        v.iter().zip(&p).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sine of the largest angle by which `other` leaves this subspace.
    pub fn excess_sin(&self, other: &Subspace) -> f64 {
        max_angle_sin(&self.frame, &other.frame)
    }

    /// Largest principal angle sine between equal-dimensional subspaces, or 1
    /// if the dimensions differ.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.dim() != other.dim() || self.ambient() != other.ambient() {
            return 1.0;
        }
        self.excess_sin(other).max(other.excess_sin(self))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient(), other.ambient());
        let (a, b) = (&self.frame, &other.frame);
        let (ra, rb) = (a.ncols(), b.ncols());
        let mut stacked = DMatrix::zeros(a.nrows(), ra + rb);
        stacked.columns_mut(0, ra).copy_from(a);
        stacked.columns_mut(ra, rb).copy_from(&(-b));
        let mut g = Gram::new(ra + rb);
        g.add_dense(&stacked);
        let null = g.nullspace(RANK_TOL);
        let coeffs = null.basis.rows(0, ra).clone_owned();
        let mut out = Subspace::span(&(a * coeffs));
        out.gap = null.gap();
        out
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut m = DMatrix::zeros(self.ambient(), self.dim() + other.dim());
        m.columns_mut(0, self.dim()).copy_from(&self.frame);
        m.columns_mut(self.dim(), other.dim()).copy_from(&other.frame);
        Subspace::span(&m)
    }

    /// Orthogonal complement of `other` inside this subspace.
    pub fn minus(&self, other: &Subspace) -> Subspace {
        let p = &other.frame * (other.frame.adjoint() * &self.frame);
        Subspace::span(&(&self.frame - p))
    }

    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.frame)
    }
}

/// Subspace of `rows x cols` matrices, vectorized column-major.
#[derive(Debug, Clone)]
pub struct OperatorSpace {
    pub rows: usize,
    pub cols: usize,
    pub space: Subspace,
}

pub fn vec_op(op: &SparseOp) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); op.rows() * op.cols()];
    for (r, c, x) in op.triplets() {
        v[r + c * op.rows()] = x;
    }
    v
}

pub fn vec_dense(m: &DMatrix<C64>) -> Vec<C64> {
    m.iter().copied().collect()
}

impl OperatorSpace {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn element(&self, i: usize) -> DMatrix<C64> {
        DMatrix::from_column_slice(self.rows, self.cols, self.space.frame().column(i).as_slice())
    }

    pub fn elements(&self) -> Vec<DMatrix<C64>> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    pub fn residual(&self, op: &SparseOp) -> f64 {
        self.space.residual(&vec_op(op))
    }

    pub fn from_ops(rows: usize, cols: usize, ops: &[SparseOp]) -> Self {
        let vecs: Vec<Vec<C64>> = ops.iter().map(vec_op).collect();
        Self { rows, cols, space: Subspace::span_vecs(rows * cols, &vecs) }
    }

    pub fn from_dense(rows: usize, cols: usize, ops: &[DMatrix<C64>]) -> Self {
        let vecs: Vec<Vec<C64>> = ops.iter().map(vec_dense).collect();
        Self { rows, cols, space: Subspace::span_vecs(rows * cols, &vecs) }
    }

    pub fn intersect(&self, other: &OperatorSpace) -> OperatorSpace {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        OperatorSpace { rows: self.rows, cols: self.cols, space: self.space.intersect(&other.space) }
    }

    /// Images `T xi` of a vector under every frame element.
    pub fn apply_all(&self, xi: &[C64]) -> Subspace {
        let x = DVector::from_column_slice(xi);
        let mut m = DMatrix::zeros(self.rows, self.dim());
        for i in 0..self.dim() {
            m.set_column(i, &(self.element(i) * &x));
        }
        Subspace::span(&m)
    }
}

fn check_square(gens: &[SparseOp]) -> Result<usize> {
    let d = gens.first().map(|g| g.rows()).unwrap_or(0);
    for g in gens {
        if g.rows() != d || g.cols() != d {
            return dimension("generators must be square and of equal size");
        }
    }
    Ok(d)
}

/// Generators together with the adjoints that are not already present.
fn with_adjoints(gens: &[SparseOp]) -> Vec<SparseOp> {
    let mut out: Vec<SparseOp> = gens.to_vec();
    for g in gens {
        let a = g.adjoint();
        let scale = g.frobenius().max(1.0);
        if !out.iter().any(|h| h.distance(&a) <= 1e-12 * scale || h.distance(&a.scale(C64::new(-1.0, 0.0))) <= 1e-12 * scale) {
            out.push(a);
        }
    }
    out
}

/// Unital *-algebra generated by `gens`, as the span of all words. Fails with
/// [`Error::Budget`] if the dimension exceeds `budget`.
pub fn algebra_closure(gens: &[SparseOp], dim_hint: usize, budget: usize) -> Result<OperatorSpace> {
    let d = if gens.is_empty() { dim_hint } else { check_square(gens)? };
    let gens: Vec<DMatrix<C64>> = with_adjoints(gens).iter().map(|g| g.to_dense()).collect();
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let mut mats: Vec<DMatrix<C64>> = Vec::new();
    let push = |m: DMatrix<C64>, basis: &mut Vec<DVector<C64>>, mats: &mut Vec<DMatrix<C64>>| -> bool {
        let mut v = DVector::from_column_slice(m.as_slice());
        let n0 = v.norm();
        if n0 < 1e-13 {
            return false;
        }
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let n = v.norm();
        if n <= 1e-9 * n0 {
            return false;
        }
        v /= C64::new(n, 0.0);
        mats.push(m);
        basis.push(v);
        true
    };
    push(DMatrix::identity(d, d), &mut basis, &mut mats);
    let mut next = 0;
    while next < mats.len() {
        let cur = mats[next].clone();
        next += 1;
        for g in &gens {
            let cand = g * &cur;
            let nc = cand.norm();
            if push(cand / C64::new(nc.max(1e-300), 0.0), &mut basis, &mut mats) && basis.len() > budget {
                return Err(Error::Budget(format!("algebra dimension exceeds {budget}")));
            }
        }
    }
    let mut frame = DMatrix::zeros(d * d, basis.len());
    for (j, b) in basis.iter().enumerate() {
        frame.set_column(j, b);
    }
    Ok(OperatorSpace { rows: d, cols: d, space: Subspace::from_orthonormal(frame) })
}

/// Solutions `T` (a `rows x cols` matrix) of `sigma T = T g` for every pair
/// `(sigma, g)` and for the adjoint pairs. Fails if `rows * cols > budget`.
pub fn intertwiners(pairs: &[(SparseOp, SparseOp)], rows: usize, cols: usize, budget: usize) -> Result<OperatorSpace> {
    let n = rows * cols;
    if n > budget {
        return Err(Error::Budget(format!("operator space of dimension {n} exceeds {budget}")));
    }
    let mut all: Vec<(SparseOp, SparseOp)> = Vec::new();
    for (s, g) in pairs {
        if s.rows() != rows || s.cols() != rows || g.rows() != cols || g.cols() != cols {
            return dimension("intertwiner pair has the wrong shape");
        }
        all.push((s.clone(), g.clone()));
        let (sa, ga) = (s.adjoint(), g.adjoint());
        let selfadj = sa.distance(s) <= 1e-12 * s.frobenius().max(1.0) && ga.distance(g) <= 1e-12 * g.frobenius().max(1.0);
        let skew = sa.distance(&s.scale(C64::new(-1.0, 0.0))) <= 1e-12 * s.frobenius().max(1.0)
            && ga.distance(&g.scale(C64::new(-1.0, 0.0))) <= 1e-12 * g.frobenius().max(1.0);
        if !selfadj && !skew {
            all.push((sa, ga));
        }
    }
    let mut gram = Gram::new(n);
    let var = |a: usize, e: usize| a + e * rows;
    for (s, g) in &all {
        let gt = g.transpose();
        for c in 0..rows {
            for e in 0..cols {
                let mut row: Vec<(usize, C64)> = s.row(c).map(|(a, v)| (var(a, e), v)).collect();
                row.extend(gt.row(e).map(|(b, v)| (var(c, b), -v)));
                if !row.is_empty() {
                    gram.add_row(&row);
                }
            }
        }
    }
    let null = gram.nullspace(RANK_TOL);
    let mut space = Subspace::from_orthonormal(null.basis.clone());
    space.gap = null.gap();
    Ok(OperatorSpace { rows, cols, space })
}

/// Commutant of `gens` inside all `d x d` matrices.
pub fn commutant(gens: &[SparseOp], dim_hint: usize, budget: usize) -> Result<OperatorSpace> {
    let d = if gens.is_empty() { dim_hint } else { check_square(gens)? };
    let pairs: Vec<(SparseOp, SparseOp)> = gens.iter().map(|g| (g.clone(), g.clone())).collect();
    intertwiners(&pairs, d, d, budget)
}

/// Vector state `<Omega, x Omega>`.
pub fn gns_trace(x: &SparseOp, omega: &[C64]) -> C64 {
    crate::fock::inner(omega, &x.apply(omega))
}

/// The antilinear map `x Omega -> x* Omega` for an algebra with cyclic and
/// separating vector `Omega`. For a tracial vector state this is the modular
/// conjugation.
pub fn modular_conjugation_generic(algebra: &OperatorSpace, omega: &[C64]) -> Result<AntiLinear> {
    let d = algebra.rows;
    if omega.len() != d {
        return dimension("vacuum vector has the wrong length");
    }
    let om = DVector::from_column_slice(omega);
    let dim = algebra.dim();
    let mut v = DMatrix::zeros(d, dim);
    let mut w = DMatrix::zeros(d, dim);
    for i in 0..dim {
        let x = algebra.element(i);
        v.set_column(i, &(&x * &om));
        w.set_column(i, &(x.adjoint() * &om));
    }
    let rank = orthonormalize(&v, 1e-10).ncols();
    if rank < d {
        return Err(Error::NotCyclic(format!("algebra vectors span {rank} of {d} dimensions")));
    }
    if dim != d {
        return Err(Error::NotCyclic(format!("vacuum is not separating: algebra dimension {dim} exceeds {d}")));
    }
    let inv = v.try_inverse().ok_or_else(|| Error::NotCyclic("singular cyclic map".into()))?;
    let k = w * inv.map(|c| c.conj());
    Ok(AntiLinear { k: SparseOp::from_dense(&k, 1e-13) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{clifford_word, conjugation, field_mode, FockSpace};

    fn cliff_gens(d: usize) -> Vec<SparseOp> {
        let s = FockSpace::Antisymmetric { modes: d };
        (0..d).map(|p| field_mode(s, p).unwrap()).collect()
    }

    #[test]
    fn closure_of_identity_is_one_dimensional() {
        let a = algebra_closure(&[SparseOp::identity(4)], 4, 64).unwrap();
        assert_eq!(a.dim(), 1);
    }

    #[test]
    fn full_clifford_closure_dimension() {
        for d in 1..=4 {
            let a = algebra_closure(&cliff_gens(d), 1 << d, 1024).unwrap();
            assert_eq!(a.dim(), 1 << d, "d = {d}");
        }
    }

    #[test]
    fn even_pair_on_even_space() {
        let s = FockSpace::Even { modes: 2 };
        let w = clifford_word(s, &[0, 1]).unwrap();
        assert_eq!(algebra_closure(std::slice::from_ref(&w), 2, 16).unwrap().dim(), 2);
        assert_eq!(commutant(&[w], 2, 16).unwrap().dim(), 2);
    }

    #[test]
    fn commutant_of_identity_is_everything() {
        assert_eq!(commutant(&[SparseOp::identity(3)], 3, 64).unwrap().dim(), 9);
    }

    #[test]
    fn clifford_commutant_and_double_commutant() {
        let gens = cliff_gens(4);
        let c = commutant(&gens, 16, 1024).unwrap();
        assert_eq!(c.dim(), 16);
        let cops: Vec<SparseOp> = c.elements().iter().map(|m| SparseOp::from_dense(m, 1e-12)).collect();
        let cc = commutant(&cops, 16, 1024).unwrap();
        assert_eq!(cc.dim(), 16);
        let a = algebra_closure(&gens, 16, 1024).unwrap();
        assert!(a.space.distance(&cc.space) < 1e-8);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(commutant(&cliff_gens(3), 8, 32), Err(Error::Budget(_))));
        assert!(matches!(algebra_closure(&cliff_gens(4), 16, 8), Err(Error::Budget(_))));
    }

    #[test]
    fn trace_of_field_products() {
        let s = FockSpace::Antisymmetric { modes: 3 };
        let om = crate::fock::StateVec::vacuum(s).coeffs;
        let f = [C64::new(1.0, 0.0), C64::new(-0.5, 0.0), C64::new(2.0, 0.0)];
        let g = [C64::new(0.3, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let uf = crate::fock::field(s, &f).unwrap();
        let ug = crate::fock::field(s, &g).unwrap();
        let t = gns_trace(&uf.mul(&ug), &om);
        let fg: f64 = f.iter().zip(&g).map(|(a, b)| a.re * b.re).sum();
        assert!((t.re - fg / 2.0).abs() < 1e-14 && t.im.abs() < 1e-14);
    }

    #[test]
    fn generic_conjugation_matches_closed_form() {
        let d = 4;
        let s = FockSpace::Antisymmetric { modes: d };
        let a = algebra_closure(&cliff_gens(d), 16, 1024).unwrap();
        let om = crate::fock::StateVec::vacuum(s).coeffs;
        let jg = modular_conjugation_generic(&a, &om).unwrap();
        let jc = conjugation(s);
        assert!(jg.k.distance(&jc.k) < 1e-10);
    }

    #[test]
    fn non_cyclic_vacuum_is_rejected() {
        let s = FockSpace::Antisymmetric { modes: 2 };
        let a = algebra_closure(&[clifford_word(s, &[0, 1]).unwrap()], 4, 64).unwrap();
        let om = crate::fock::StateVec::vacuum(s).coeffs;
        assert!(matches!(modular_conjugation_generic(&a, &om), Err(Error::NotCyclic(_))));
    }
}
