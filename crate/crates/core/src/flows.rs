//! Clifford, even Clifford and free flows at finite resolution: shift
//! embeddings, intertwiner fibers, relative commutants and the tau-semiflow.
//!
//! A model on `m` cells acts on the Fock space over `m * n` modes. The shift
//! by `k` cells maps the model on `m - k` cells into the one on `m` cells;
//! generators supported on cells `>= k` of the large model form the future
//! algebra at time `k`.
//!
//! Two versions of each fiber are computed. The raw version solves the
//! defining equations on the truncated model. With finitely many future modes
//! the product of all future generators commutes with the whole future
//! algebra, which adds spurious solutions. The stable version removes them by
//! imposing the equations also for `lookahead` extra future cells, on which
//! the unknown vectors are not allowed to have support.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{intertwiners, OperatorSpace, Subspace};
use crate::error::{domain, Result};
use crate::fock::{clifford_word, conjugation, embedding, field_mode, shift_operator, AntiLinear, FockSpace};
use crate::linalg::{hermitian_eigen, Gram};
use crate::onepart::Grid;
use crate::sparse::SparseOp;
use crate::{Error, C64, RANK_TOL};

/// Default cap on the number of unknowns in an operator-level solve.
pub const OP_BUDGET: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowKind {
    Clifford,
    EvenClifford,
    Free,
}

impl FlowKind {
    pub fn name(&self) -> &'static str {
        match self {
            FlowKind::Clifford => "clifford",
            FlowKind::EvenClifford => "even_clifford",
            FlowKind::Free => "free",
        }
    }
}

/// A flow model on a grid. `max_len` is the word-length truncation of the
/// full Fock space and is ignored by the Clifford kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowModel {
    pub kind: FlowKind,
    pub grid: Grid,
    pub max_len: usize,
}

impl FlowModel {
    pub fn new(kind: FlowKind, grid: Grid, max_len: usize) -> Result<Self> {
        let model = Self { kind, grid, max_len };
        model.space(grid.cells + model.lookahead()).check()?;
        if kind == FlowKind::Free {
            FockSpace::Full { letters: (grid.cells + model.lookahead()) * grid.internal_dim, max_len: max_len + 1 }.check()?;
        }
        Ok(model)
    }

    pub fn clifford(cells: usize, width: f64, n: usize) -> Result<Self> {
        Self::new(FlowKind::Clifford, Grid::new(cells, width, n)?, 0)
    }

    pub fn even_clifford(cells: usize, width: f64, n: usize) -> Result<Self> {
        Self::new(FlowKind::EvenClifford, Grid::new(cells, width, n)?, 0)
    }

    pub fn free(cells: usize, width: f64, n: usize, max_len: usize) -> Result<Self> {
        Self::new(FlowKind::Free, Grid::new(cells, width, n)?, max_len)
    }

    pub fn cells(&self) -> usize {
        self.grid.cells
    }

    pub fn n(&self) -> usize {
        self.grid.internal_dim
    }

    pub fn with_cells(&self, cells: usize) -> Self {
        Self { grid: self.grid.with_cells(cells), ..*self }
    }

    pub fn refine(&self) -> Self {
        Self { grid: self.grid.refine(), ..*self }
    }

    /// Number of extra future cells used by the stable fibers.
    pub fn lookahead(&self) -> usize {
        match self.kind {
            FlowKind::Free => 2usize.div_ceil(self.n()).max(1),
            _ => 1,
        }
    }

    /// GNS space of the model restricted to `cells` cells.
    pub fn space(&self, cells: usize) -> FockSpace {
        let modes = cells * self.n();
        match self.kind {
            FlowKind::Clifford => FockSpace::Antisymmetric { modes },
            FlowKind::EvenClifford => FockSpace::Even { modes },
            FlowKind::Free => FockSpace::Full { letters: modes, max_len: self.max_len },
        }
    }

    fn extended_space(&self, cells: usize) -> FockSpace {
        match self.space(cells) {
            FockSpace::Full { letters, max_len } => FockSpace::Full { letters, max_len: max_len + 1 },
            s => s,
        }
    }

    pub fn vacuum(&self, cells: usize) -> Vec<C64> {
        crate::fock::StateVec::vacuum(self.space(cells)).coeffs
    }

    /// Generators supported on the modes `lo..hi`, acting on `space`.
    pub fn generators_on(&self, space: FockSpace, lo: usize, hi: usize) -> Result<Vec<SparseOp>> {
        let mut out = Vec::new();
        match self.kind {
            FlowKind::Clifford | FlowKind::Free => {
                for p in lo..hi {
                    out.push(field_mode(space, p)?);
                }
            }
            FlowKind::EvenClifford => {
                for p in lo..hi {
                    for q in p + 1..hi {
                        out.push(clifford_word(space, &[p, q])?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// All generators of the model on its own space.
    pub fn generators(&self) -> Result<Vec<SparseOp>> {
        self.generators_on(self.space(self.cells()), 0, self.grid.dim())
    }

    /// Pairs `(sigma_k(g), g)` with `g` a generator of the model on `m - k`
    /// cells and `sigma_k(g)` its translate acting on the model on `m` cells.
    pub fn sigma_pairs(&self, k: usize) -> Result<Vec<(SparseOp, SparseOp)>> {
        let m = self.cells();
        if k > m {
            return domain(format!("shift {k} exceeds {m} cells"));
        }
        let n = self.n();
        let src = self.space(m - k);
        let tgt = self.space(m);
        let g = self.generators_on(src, 0, (m - k) * n)?;
        let s = self.generators_on(tgt, k * n, m * n)?;
        Ok(s.into_iter().zip(g).collect())
    }

    pub fn conjugation(&self, cells: usize) -> AntiLinear {
        conjugation(self.space(cells))
    }

    /// Second quantization of the shift by `k` cells, from the model on
    /// `m - k` cells into the model on `m` cells.
    pub fn canonical_unit(&self, k: usize) -> Result<SparseOp> {
        let m = self.cells();
        if k > m {
            return domain(format!("shift {k} exceeds {m} cells"));
        }
        shift_operator(self.space(m - k), self.space(m), k * self.n())
    }

    /// Span of even wedge products over the first `k` cells, inside the space
    /// of the model.
    pub fn even_wedge_space(&self, k: usize) -> Result<Subspace> {
        let space = self.space(self.cells());
        if self.kind == FlowKind::Free {
            return domain("even wedge space of a free model");
        }
        let past = k * self.n();
        let mut vecs = Vec::new();
        for mask in 0..1usize << past {
            if mask.count_ones() % 2 == 0 {
                let mut v = vec![C64::new(0.0, 0.0); space.dim()];
                v[space.mask_index(mask).unwrap()] = C64::new(1.0, 0.0);
                vecs.push(v);
            }
        }
        Ok(Subspace::span_vecs(space.dim(), &vecs))
    }
}

/// Solutions `xi` in the model space of `(g - J g* J) xi = 0` for the future
/// generators `g` of the model extended by `extra` cells.
fn central_vectors(model: &FlowModel, k: usize, extra: usize) -> Result<(Subspace, f64)> {
    let m = model.cells();
    let n = model.n();
    let space = model.space(m);
    let ext_cells = m + extra;
    let ext = if extra == 0 { space } else { model.extended_space(ext_cells) };
    let emb = embedding(space, ext)?;
    let j = conjugation(ext);
    let gens = model.generators_on(ext, k * n, ext_cells * n)?;
    let mut gram = Gram::new(space.dim());
    let mut constraints = Vec::new();
    for g in &gens {
        let c = g.sub(&j.right_mult(g)).mul(&emb);
        for r in 0..c.rows() {
            let row: Vec<(usize, C64)> = c.row(r).collect();
            if !row.is_empty() {
                gram.add_row(&row);
            }
        }
        constraints.push(c);
    }
    let null = gram.nullspace(RANK_TOL);
    let mut sub = Subspace::from_orthonormal(null.basis.clone());
    sub.gap = null.gap();
    // leakage: the part of g xi a truncated model would have dropped
    let mut leak: f64 = 0.0;
    if let (FockSpace::Full { max_len, .. }, true) = (space, extra > 0) {
        for g in &gens {
            let ge = g.mul(&emb);
            for i in 0..sub.dim() {
                let v = ge.apply(&sub.vector(i));
                let top: f64 =
                    v.iter().enumerate().filter(|(idx, _)| ext.particles(*idx) > max_len).map(|(_, x)| x.norm_sqr()).sum();
                leak = leak.max(top.sqrt());
            }
        }
    }
    Ok((sub, leak))
}

/// Operator-level relative commutant and its vacuum vectors.
#[derive(Debug, Clone)]
pub struct RelativeCommutant {
    pub k: usize,
    /// Elements of the stable relative commutant acting on the model space,
    /// available for the Clifford kinds.
    pub ops: Option<Vec<SparseOp>>,
    /// `A(k) Omega` for the stable relative commutant.
    pub vectors: Subspace,
    /// Dimension of the raw relative commutant on the truncated model.
    pub raw_dim: Option<usize>,
    pub gap: f64,
}

impl RelativeCommutant {
    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }
}

/// Words `u(I)` spanning the model algebra (even words for the even kind).
fn word_basis(model: &FlowModel, cells: usize) -> Vec<Vec<usize>> {
    let d = cells * model.n();
    (0..1usize << d)
        .filter(|m| model.kind != FlowKind::EvenClifford || m.count_ones() % 2 == 0)
        .map(|m| (0..d).filter(|p| m & (1 << p) != 0).collect())
        .collect()
}

/// Coefficient vectors of model words commuting with the future generators of
/// the model extended by `extra` cells.
fn commuting_words(model: &FlowModel, k: usize, extra: usize) -> Result<(Vec<Vec<usize>>, DMatrix<C64>, f64)> {
    let m = model.cells();
    let n = model.n();
    let words = word_basis(model, m);
    let ext = model.space(m + extra);
    let gens = model.generators_on(ext, k * n, (m + extra) * n)?;
    let mut comms: Vec<Vec<Vec<(usize, C64)>>> = Vec::with_capacity(words.len());
    for w in &words {
        let op = clifford_word(ext, w)?;
        let per_gen = gens
            .iter()
            .map(|g| {
                let c = op.mul(g).sub(&g.mul(&op));
                let mut e: Vec<(usize, C64)> = c.triplets().map(|(r, col, v)| (r + col * c.rows(), v)).collect();
                e.sort_by_key(|x| x.0);
                e
            })
            .collect();
        comms.push(per_gen);
    }
    let nw = words.len();
    let mut g = DMatrix::<C64>::zeros(nw, nw);
    for a in 0..nw {
        for b in a..nw {
            let mut s = C64::new(0.0, 0.0);
            for (x, y) in comms[a].iter().zip(&comms[b]) {
                s += sparse_dotc(x, y);
            }
            g[(a, b)] = s;
            g[(b, a)] = s.conj();
        }
    }
    let null = Gram::from_matrix(g).nullspace(RANK_TOL);
    Ok((words, null.basis.clone(), null.gap()))
}

fn sparse_dotc(x: &[(usize, C64)], y: &[(usize, C64)]) -> C64 {
    let (mut i, mut j) = (0, 0);
    let mut s = C64::new(0.0, 0.0);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += x[i].1.conj() * y[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

/// Relative commutant `A(k) = M ∩ sigma_k(M)'`.
///
/// For the Clifford kinds the stable version is solved over the word basis of
/// the model algebra; the raw dimension on the truncated model is reported
/// alongside. For the free kind the relative commutant is computed through its
/// vacuum vectors, which determine it because the vacuum is separating.
pub fn relative_commutant(model: &FlowModel, k: usize) -> Result<RelativeCommutant> {
    let m = model.cells();
    if k > m {
        return domain(format!("time {k} exceeds {m} cells"));
    }
    if model.kind == FlowKind::Free {
        let (vectors, _) = central_vectors(model, k, model.lookahead())?;
        let gap = vectors.gap;
        return Ok(RelativeCommutant { k, ops: None, vectors, raw_dim: None, gap });
    }
    if word_basis(model, m).len() > OP_BUDGET {
        return Err(Error::Budget(format!("{} words exceed {OP_BUDGET}", word_basis(model, m).len())));
    }
    let (words, coeffs, gap) = commuting_words(model, k, model.lookahead())?;
    let (_, raw, _) = commuting_words(model, k, 0)?;
    let space = model.space(m);
    let word_ops: Vec<SparseOp> = words.iter().map(|w| clifford_word(space, w)).collect::<Result<_>>()?;
    let mut ops = Vec::new();
    for c in 0..coeffs.ncols() {
        let mut op = SparseOp::zero(space.dim(), space.dim());
        for (i, w) in word_ops.iter().enumerate() {
            let x = coeffs[(i, c)];
            if x.norm() > 1e-14 {
                op = op.add(&w.scale(x));
            }
        }
        ops.push(op);
    }
    let om = model.vacuum(m);
    let vecs: Vec<Vec<C64>> = ops.iter().map(|x| x.apply(&om)).collect();
    let mut vectors = Subspace::span_vecs(space.dim(), &vecs);
    vectors.gap = gap;
    Ok(RelativeCommutant { k, ops: Some(ops), vectors, raw_dim: Some(raw.ncols()), gap })
}

/// Result of a fiber computation at time `k`.
#[derive(Debug, Clone)]
pub struct FiberReport {
    pub k: usize,
    /// Dimension of the intertwiner space `E` (operator level, raw model).
    pub e_dim: Option<usize>,
    /// Dimension of the conjugate intertwiner space `E'`.
    pub eprime_dim: Option<usize>,
    /// Dimension of `H = E ∩ E'` on the raw model.
    pub h_dim_raw: Option<usize>,
    /// `H Omega` on the raw model.
    pub raw_frame: Option<Subspace>,
    /// Dimension of the stable `H Omega`.
    pub h_dim: usize,
    /// Stable `H Omega` inside the model space.
    pub frame: Subspace,
    pub leakage: f64,
    pub gap: f64,
    /// Residual of the canonical unit in the intertwiner equations.
    pub canonical_residual: f64,
}

/// Operator-level intertwiner spaces on the raw model.
pub struct RawFiber {
    pub e: OperatorSpace,
    pub eprime: OperatorSpace,
    pub h: OperatorSpace,
}

fn conjugate_pairs(model: &FlowModel, k: usize, pairs: &[(SparseOp, SparseOp)]) -> Vec<(SparseOp, SparseOp)> {
    let m = model.cells();
    let jt = model.conjugation(m);
    let js = model.conjugation(m - k);
    pairs.iter().map(|(s, g)| (jt.conjugate(s), js.conjugate(g))).collect()
}

/// `E`, `E'` and `H` as operator spaces from the model on `m - k` cells to the
/// model on `m` cells.
pub fn raw_fiber(model: &FlowModel, k: usize, budget: usize) -> Result<RawFiber> {
    if model.kind == FlowKind::Free {
        return domain("operator-level fibers are not available for the free model");
    }
    let m = model.cells();
    let pairs = model.sigma_pairs(k)?;
    let (rows, cols) = (model.space(m).dim(), model.space(m - k).dim());
    let cpairs = conjugate_pairs(model, k, &pairs);
    let e = intertwiners(&pairs, rows, cols, budget)?;
    let eprime = intertwiners(&cpairs, rows, cols, budget)?;
    let both: Vec<(SparseOp, SparseOp)> = pairs.iter().chain(cpairs.iter()).cloned().collect();
    let h = intertwiners(&both, rows, cols, budget)?;
    Ok(RawFiber { e, eprime, h })
}

/// Intertwiner space `E` alone.
pub fn intertwiner_space(model: &FlowModel, k: usize, budget: usize) -> Result<OperatorSpace> {
    let m = model.cells();
    let pairs = model.sigma_pairs(k)?;
    intertwiners(&pairs, model.space(m).dim(), model.space(m - k).dim(), budget)
}

/// Span of `x' Gamma(shift_k)` over the commutant, built from `x' = J x J`
/// with `x` running over the words of the model algebra.
pub fn commutant_times_unit(model: &FlowModel, k: usize) -> Result<OperatorSpace> {
    if model.kind == FlowKind::Free {
        return domain("commutant words are not available for the free model");
    }
    let m = model.cells();
    let space = model.space(m);
    let j = model.conjugation(m);
    let s = model.canonical_unit(k)?;
    let ops: Vec<SparseOp> =
        word_basis(model, m).iter().map(|w| Ok(j.conjugate(&clifford_word(space, w)?).mul(&s))).collect::<Result<_>>()?;
    Ok(OperatorSpace::from_ops(space.dim(), model.space(m - k).dim(), &ops))
}

/// Residual of `Gamma(shift_k)` in the equations of `E` and `E'`.
pub fn canonical_residual(model: &FlowModel, k: usize) -> Result<f64> {
    let pairs = model.sigma_pairs(k)?;
    let cpairs = conjugate_pairs(model, k, &pairs);
    let s = model.canonical_unit(k)?;
    let mut r: f64 = 0.0;
    for (sg, g) in pairs.iter().chain(cpairs.iter()) {
        r = r.max(sg.mul(&s).sub(&s.mul(g)).frobenius());
    }
    Ok(r)
}

/// Fibers at time `k`.
pub fn fibers(model: &FlowModel, k: usize, budget: usize) -> Result<FiberReport> {
    let m = model.cells();
    if k > m {
        return domain(format!("time {k} exceeds {m} cells"));
    }
    let (frame, leakage) = central_vectors(model, k, model.lookahead())?;
    let mut report = FiberReport {
        k,
        e_dim: None,
        eprime_dim: None,
        h_dim_raw: None,
        raw_frame: None,
        h_dim: frame.dim(),
        gap: frame.gap,
        frame,
        leakage,
        canonical_residual: canonical_residual(model, k)?,
    };
    if model.kind != FlowKind::Free && model.space(m).dim() * model.space(m - k).dim() <= budget {
        let raw = raw_fiber(model, k, budget)?;
        let om = model.vacuum(m - k);
        report.e_dim = Some(raw.e.dim());
        report.eprime_dim = Some(raw.eprime.dim());
        report.h_dim_raw = Some(raw.h.dim());
        report.raw_frame = Some(raw.h.apply_all(&om));
    }
    Ok(report)
}

/// Stable `H_k Omega` for `k = 0..=m`.
pub fn stable_fiber(model: &FlowModel, k: usize) -> Result<Subspace> {
    Ok(central_vectors(model, k, model.lookahead())?.0)
}

/// Raw `H_k Omega` computed from vectors on the truncated model.
pub fn raw_central_vectors(model: &FlowModel, k: usize) -> Result<Subspace> {
    Ok(central_vectors(model, k, 0)?.0)
}

fn check_tuple(t: &[usize], name: &str) -> Result<()> {
    if t.windows(2).any(|w| w[0] >= w[1]) {
        return domain(format!("{name} must be strictly increasing"));
    }
    Ok(())
}

/// Sign `mu` with `w(F') w(I) w(F) w(F')* = mu w(I) w(F)` for products of
/// unitary Clifford generators `w(e) = sqrt 2 u(e)`, where `I` is disjoint
/// from `F` and `F'`: `(-1)^{|I||F'| + |F||F'| - |F ∩ F'|}`.
pub fn parity_sign(i: &[usize], f: &[usize], fp: &[usize]) -> Result<i8> {
    check_tuple(i, "I")?;
    check_tuple(f, "F")?;
    check_tuple(fp, "F'")?;
    if i.iter().any(|x| f.contains(x) || fp.contains(x)) {
        return domain("I must be disjoint from F and F'");
    }
    let common = f.iter().filter(|x| fp.contains(x)).count();
    let e = i.len() * fp.len() + f.len() * fp.len() + common;
    Ok(if e.is_multiple_of(2) { 1 } else { -1 })
}

/// Matrix evaluation of the sign in [`parity_sign`] on `modes` modes, by
/// conjugating the operator products directly.
pub fn parity_sign_oracle(modes: usize, i: &[usize], f: &[usize], fp: &[usize]) -> Result<f64> {
    let space = FockSpace::Antisymmetric { modes };
    let unitary = |t: &[usize]| -> Result<SparseOp> {
        Ok(clifford_word(space, t)?.scale(C64::new(2f64.powf(t.len() as f64 / 2.0), 0.0)))
    };
    let wfp = unitary(fp)?;
    let wi = unitary(i)?;
    let wf = unitary(f)?;
    let lhs = wfp.mul(&wi).mul(&wf).mul(&wfp.adjoint());
    let rhs = wi.mul(&wf);
    let num: C64 = rhs.triplets().map(|(r, c, x)| x.conj() * lhs.get(r, c)).sum();
    let den: f64 = rhs.triplets().map(|(_, _, x)| x.norm_sqr()).sum();
    let mu = num / den;
    if lhs.distance(&rhs.scale(mu)) > 1e-10 {
        return Err(Error::Construction("conjugate is not proportional to the word".into()));
    }
    Ok(mu.re)
}

/// One row of the tau-semiflow table.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiflowRow {
    pub k: usize,
    pub dim: usize,
    /// `sum_ij |tau(x_i x_j)|^2` over an orthonormal frame.
    pub m2: f64,
    /// `sum_ijl |tau(x_i x_j x_l)|^2` over an orthonormal frame.
    pub m3: f64,
}

/// Orthonormalizes operators so that their vacuum vectors are orthonormal.
fn orthonormal_ops(ops: &[SparseOp], om: &[C64]) -> Vec<DMatrix<C64>> {
    let d = om.len();
    let om = DVector::from_column_slice(om);
    let dense: Vec<DMatrix<C64>> = ops.iter().map(|o| o.to_dense()).collect();
    let r = dense.len();
    let mut v = DMatrix::zeros(d, r);
    for (i, x) in dense.iter().enumerate() {
        v.set_column(i, &(x * &om));
    }
    let g = v.adjoint() * &v;
    let (vals, vecs) = hermitian_eigen(&g);
    let mut out = Vec::new();
    for i in 0..r {
        if vals[i] > 1e-12 {
            let mut x = DMatrix::zeros(d, d);
            for (a, xa) in dense.iter().enumerate() {
                x += xa * (vecs[(a, i)] / C64::new(vals[i].sqrt(), 0.0));
            }
            out.push(x);
        }
    }
    out
}

/// Dimensions and trace moments of the stable relative commutants for
/// `k = 0..=k_max`.
pub fn semiflow_table(model: &FlowModel, k_max: usize) -> Result<Vec<SemiflowRow>> {
    let m = model.cells();
    if k_max > m {
        return domain(format!("k_max {k_max} exceeds {m} cells"));
    }
    let om = model.vacuum(m);
    let omv = DVector::from_column_slice(&om);
    let mut rows = Vec::new();
    for k in 0..=k_max {
        let rc = relative_commutant(model, k)?;
        let xs: Vec<DMatrix<C64>> = match &rc.ops {
            Some(ops) => orthonormal_ops(ops, &om),
            None => {
                // without operator frames only the scalar case is handled
                if rc.dim() != 1 || rc.vectors.residual(&om) > 1e-8 {
                    return Err(Error::Construction("free relative commutant is not scalar".into()));
                }
                vec![DMatrix::identity(om.len(), om.len())]
            }
        };
        let tau = |x: &DMatrix<C64>| omv.dotc(&(x * &omv));
        let mut m2 = 0.0;
        let mut m3 = 0.0;
        for a in &xs {
            for b in &xs {
                let ab = a * b;
                m2 += tau(&ab).norm_sqr();
                for c in &xs {
                    m3 += tau(&(&ab * c)).norm_sqr();
                }
            }
        }
        rows.push(SemiflowRow { k, dim: rc.dim(), m2, m3 });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_commutant_at_zero_is_scalar() {
        for model in [FlowModel::clifford(2, 0.5, 1).unwrap(), FlowModel::clifford(3, 0.5, 1).unwrap()] {
            let rc = relative_commutant(&model, 0).unwrap();
            assert_eq!(rc.dim(), 1);
        }
    }

    #[test]
    fn clifford_relative_commutant_dims() {
        let model = FlowModel::clifford(2, 0.5, 1).unwrap();
        let rc = relative_commutant(&model, 1).unwrap();
        // only the scalars are even over a single mode
        assert_eq!(rc.dim(), 1);
        assert_eq!(rc.raw_dim, Some(2));
        let model = FlowModel::clifford(2, 0.5, 2).unwrap();
        let rc = relative_commutant(&model, 1).unwrap();
        assert_eq!(rc.dim(), 2);
        assert_eq!(rc.raw_dim, Some(4));
    }

    #[test]
    fn clifford_fiber_is_even_wedge_space() {
        let model = FlowModel::clifford(2, 0.5, 2).unwrap();
        let rep = fibers(&model, 1, OP_BUDGET).unwrap();
        assert_eq!(rep.h_dim, 2);
        let even = model.even_wedge_space(1).unwrap();
        assert!(rep.frame.distance(&even) < 1e-10);
        assert!(rep.canonical_residual < 1e-12);
        assert_eq!(rep.h_dim_raw, Some(4));
        assert_eq!(rep.e_dim, Some(16));
    }

    #[test]
    fn free_fiber_is_one_dimensional() {
        let model = FlowModel::free(2, 0.5, 2, 4).unwrap();
        let rep = fibers(&model, 1, OP_BUDGET).unwrap();
        assert_eq!(rep.h_dim, 1);
        assert!(rep.frame.residual(&model.vacuum(2)) < 1e-10);
        assert!(rep.canonical_residual < 1e-12);
    }

    #[test]
    fn parity_sign_examples() {
        assert_eq!(parity_sign(&[0], &[], &[2]).unwrap(), -1);
        assert_eq!(parity_sign(&[0, 1], &[], &[2]).unwrap(), 1);
        assert_eq!(parity_sign(&[], &[2], &[2]).unwrap(), 1);
        assert_eq!(parity_sign(&[], &[2], &[3]).unwrap(), -1);
        assert!(parity_sign(&[1, 0], &[], &[]).is_err());
        assert!(parity_sign(&[1], &[1], &[]).is_err());
        for (i, f, fp) in [(vec![0], vec![2], vec![2, 3]), (vec![0, 1], vec![3], vec![2])] {
            let s = parity_sign(&i, &f, &fp).unwrap() as f64;
            assert!((s - parity_sign_oracle(4, &i, &f, &fp).unwrap()).abs() < 1e-12);
        }
    }
}
