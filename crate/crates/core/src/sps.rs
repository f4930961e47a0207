//! Super product systems at grid resolution.
//!
//! Fiber `k` lives inside an ambient Fock space over the first `k` cells and
//! the product `U_{j,k}` places the second factor after the first. On every
//! ambient kind the product sends basis vectors to basis vectors, so it is
//! computed entrywise.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Subspace;
use crate::error::{domain, Result};
use crate::flows::{stable_fiber, FlowKind, FlowModel};
use crate::fock::{second_quantize, word_at, word_index, FockSpace};
use crate::linalg::Gram;
use crate::sparse::SparseOp;
use crate::{Error, C64, RANK_TOL};

const ISOMETRY_TOL: f64 = 1e-10;
/// Largest frame size sampled per fiber in the construction checks.
const SAMPLE_COLS: usize = 8;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Ambient Fock space family carrying the fibers.
#[derive(Debug, Clone, PartialEq)]
pub enum Ambient {
    /// Antisymmetric Fock space over `k * n` modes.
    Antisym { n: usize },
    /// Full Fock space over `k * n` letters, words of length `<= max_len`.
    Full { n: usize, max_len: usize },
    /// `C` in every fiber.
    Trivial,
    Tensor(Box<Ambient>, Box<Ambient>),
}

impl Ambient {
    pub fn dim(&self, k: usize) -> usize {
        match self {
            Ambient::Antisym { n } => 1 << (k * n),
            Ambient::Full { n, max_len } => FockSpace::Full { letters: k * n, max_len: *max_len }.dim(),
            Ambient::Trivial => 1,
            Ambient::Tensor(a, b) => a.dim(k) * b.dim(k),
        }
    }

    pub fn check(&self, k: usize) -> Result<()> {
        match self {
            Ambient::Antisym { n } => FockSpace::Antisymmetric { modes: k * n }.check(),
            Ambient::Full { n, max_len } => FockSpace::Full { letters: k * n, max_len: *max_len }.check(),
            Ambient::Trivial => Ok(()),
            Ambient::Tensor(a, b) => {
                a.check(k)?;
                b.check(k)?;
                if a.dim(k).saturating_mul(b.dim(k)) > 1 << 24 {
                    return Err(Error::Budget(format!("tensor fiber at {k} cells is too large")));
                }
                Ok(())
            }
        }
    }

    /// Index of `U_{j,k}(e_a (x) e_b)`, or `None` if it falls outside a
    /// truncated ambient space.
    pub fn basis_product(&self, j: usize, k: usize, a: usize, b: usize) -> Option<usize> {
        match self {
            Ambient::Antisym { n } => Some(a | (b << (j * n))),
            Ambient::Full { n, max_len } => {
                let mut w = word_at(j * n, a);
                w.extend(word_at(k * n, b).into_iter().map(|c| c + j * n));
                word_index((j + k) * n, *max_len, &w)
            }
            Ambient::Trivial => Some(0),
            Ambient::Tensor(x, y) => {
                let (dj, dk) = (y.dim(j), y.dim(k));
                let r1 = x.basis_product(j, k, a / dj, b / dk)?;
                let r2 = y.basis_product(j, k, a % dj, b % dk)?;
                Some(r1 * y.dim(j + k) + r2)
            }
        }
    }

    /// Identification of each of `k` coarse cells with `2^levels` fine
    /// cells, as a map from the coarse ambient space over `k` cells to the
    /// fine one over `k * 2^levels` cells.
    pub fn refinement_map(&self, k: usize, levels: u32) -> Result<SparseOp> {
        let parts = 1usize << levels;
        let amp = (parts as f64).powf(-0.5);
        self.check(k * parts)?;
        match self {
            Ambient::Antisym { n } => {
                let mut v = DMatrix::zeros(k * parts * n, k * n);
                for c in 0..k {
                    for i in 0..parts {
                        for j in 0..*n {
                            v[((c * parts + i) * n + j, c * n + j)] = C64::new(amp, 0.0);
                        }
                    }
                }
                second_quantize(&v)
            }
            Ambient::Full { n, max_len } => {
                let coarse = FockSpace::Full { letters: k * n, max_len: *max_len };
                let fine_letters = k * parts * n;
                let mut t = Vec::new();
                for idx in 0..coarse.dim() {
                    let w = coarse.word_at(idx);
                    let coeff = C64::new(amp.powi(w.len() as i32), 0.0);
                    let combos = parts.pow(w.len() as u32);
                    for mut c in 0..combos {
                        let mut fine = Vec::with_capacity(w.len());
                        for &letter in w.iter().rev() {
                            let (cell, j) = (letter / n, letter % n);
                            fine.push((cell * parts + c % parts) * n + j);
                            c /= parts;
                        }
                        fine.reverse();
                        t.push((word_index(fine_letters, *max_len, &fine).unwrap(), idx, coeff));
                    }
                }
                Ok(SparseOp::from_triplets(self.dim(k * parts), self.dim(k), t))
            }
            Ambient::Trivial => Ok(SparseOp::identity(1)),
            Ambient::Tensor(a, b) => Ok(kron(&a.refinement_map(k, levels)?, &b.refinement_map(k, levels)?)),
        }
    }
}

fn kron(a: &SparseOp, b: &SparseOp) -> SparseOp {
    let mut t = Vec::with_capacity(a.nnz() * b.nnz());
    for (r1, c1, x) in a.triplets() {
        for (r2, c2, y) in b.triplets() {
            t.push((r1 * b.rows() + r2, c1 * b.cols() + c2, x * y));
        }
    }
    SparseOp::from_triplets(a.rows() * b.rows(), a.cols() * b.cols(), t)
}

/// A fiber: the whole ambient space, kept implicit, or a subspace of it.
#[derive(Debug, Clone)]
pub enum Fiber {
    Full(usize),
    Sub(Subspace),
}

impl Fiber {
    pub fn dim(&self) -> usize {
        match self {
            Fiber::Full(d) => *d,
            Fiber::Sub(s) => s.dim(),
        }
    }

    pub fn ambient(&self) -> usize {
        match self {
            Fiber::Full(d) => *d,
            Fiber::Sub(s) => s.ambient(),
        }
    }

    pub fn gap(&self) -> f64 {
        match self {
            Fiber::Full(_) => f64::INFINITY,
            Fiber::Sub(s) => s.gap,
        }
    }

    /// Distance from `v` to the fiber.
    pub fn residual(&self, v: &[C64]) -> f64 {
        match self {
            Fiber::Full(_) => 0.0,
            Fiber::Sub(s) => s.residual(v),
        }
    }

    /// `i`-th vector of the orthonormal frame.
    pub fn vector(&self, i: usize) -> Vec<C64> {
        match self {
            Fiber::Full(d) => {
                let mut v = vec![zero(); *d];
                v[i] = C64::new(1.0, 0.0);
                v
            }
            Fiber::Sub(s) => s.vector(i),
        }
    }

    /// The fiber as an explicit subspace.
    pub fn subspace(&self) -> Subspace {
        match self {
            Fiber::Full(d) => Subspace::full(*d),
            Fiber::Sub(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone)]
enum Source {
    Car { n: usize },
    Flow(FlowModel),
    Trivial,
    Tensor(Box<SuperProductSystem>, Box<SuperProductSystem>),
}

/// Fibers `0..=k_max` of a super product system on a grid of width `width`.
#[derive(Debug, Clone)]
pub struct SuperProductSystem {
    pub name: String,
    width: f64,
    ambient: Ambient,
    source: Source,
    fibers: Vec<Fiber>,
    /// Largest deviation from isometry or fiber closure seen at construction.
    pub isometry_residual: f64,
}

impl SuperProductSystem {
    /// Product system of the CAR flow of rank `n`: every fiber is the full
    /// antisymmetric Fock space over its cells.
    pub fn car(n: usize, width: f64, k_max: usize) -> Result<Self> {
        Self::build(format!("car{n}"), width, Ambient::Antisym { n }, Source::Car { n }, k_max)
    }

    pub fn trivial(width: f64, k_max: usize) -> Result<Self> {
        Self::build("trivial".into(), width, Ambient::Trivial, Source::Trivial, k_max)
    }

    /// Fibers `H_k Omega` of a flow model, taken from the stable fiber of the
    /// model restricted to `k` cells.
    pub fn from_flow(model: &FlowModel, k_max: usize) -> Result<Self> {
        let ambient = match model.kind {
            FlowKind::Clifford | FlowKind::EvenClifford => Ambient::Antisym { n: model.n() },
            FlowKind::Free => Ambient::Full { n: model.n(), max_len: model.max_len },
        };
        Self::build(model.kind.name().into(), model.grid.width, ambient, Source::Flow(*model), k_max)
    }

    pub fn tensor(a: &SuperProductSystem, b: &SuperProductSystem) -> Result<Self> {
        if (a.width - b.width).abs() > 1e-12 * a.width.max(b.width) {
            return domain(format!("cell widths {} and {} differ", a.width, b.width));
        }
        let k_max = a.k_max().min(b.k_max());
        let ambient = Ambient::Tensor(Box::new(a.ambient.clone()), Box::new(b.ambient.clone()));
        let source = Source::Tensor(Box::new(a.clone()), Box::new(b.clone()));
        Self::build(format!("{}x{}", a.name, b.name), a.width, ambient, source, k_max)
    }

    fn build(name: String, width: f64, ambient: Ambient, source: Source, k_max: usize) -> Result<Self> {
        let mut fibers = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            ambient.check(k)?;
            fibers.push(Self::compute_fiber(&ambient, &source, k)?);
        }
        let mut sps = Self { name, width, ambient, source, fibers, isometry_residual: 0.0 };
        sps.isometry_residual = sps.product_residual()?;
        if sps.isometry_residual > ISOMETRY_TOL {
            return Err(Error::Construction(format!(
                "product of {} is not isometric into the fibers (residual {:.2e})",
                sps.name, sps.isometry_residual
            )));
        }
        Ok(sps)
    }

    fn compute_fiber(ambient: &Ambient, source: &Source, k: usize) -> Result<Fiber> {
        let dim = ambient.dim(k);
        match source {
            Source::Car { .. } => Ok(Fiber::Full(dim)),
            Source::Trivial => Ok(Fiber::Full(1)),
            Source::Flow(model) => {
                let mut vac = vec![zero(); dim];
                vac[0] = C64::new(1.0, 0.0);
                if k == 0 {
                    return Ok(Fiber::Sub(Subspace::span_vecs(dim, &[vac])));
                }
                let small = model.with_cells(k);
                let sub = stable_fiber(&small, k)?;
                let space = small.space(k);
                let frame = match space {
                    FockSpace::Even { .. } => {
                        let mut f = DMatrix::zeros(dim, sub.dim());
                        for i in 0..space.dim() {
                            f.set_row(space.mask_at(i), &sub.frame().row(i));
                        }
                        f
                    }
                    _ => sub.frame().clone(),
                };
                let mut out = Subspace::from_orthonormal(frame);
                out.gap = sub.gap;
                Ok(Fiber::Sub(out))
            }
            Source::Tensor(a, b) => match (a.fiber(k)?, b.fiber(k)?) {
                (Fiber::Full(x), Fiber::Full(y)) => Ok(Fiber::Full(x * y)),
                (fa, fb) => {
                    let frame = fa.subspace().frame().kronecker(fb.subspace().frame());
                    Ok(Fiber::Sub(Subspace::from_orthonormal(frame)))
                }
            },
        }
    }

    /// The same system on the grid with cells halved.
    pub fn refine(&self, k_max: usize) -> Result<Self> {
        let width = self.width / 2.0;
        match &self.source {
            Source::Car { n } => Self::car(*n, width, k_max),
            Source::Trivial => Self::trivial(width, k_max),
            Source::Flow(model) => Self::from_flow(&model.refine(), k_max),
            Source::Tensor(a, b) => Self::tensor(&a.refine(k_max)?, &b.refine(k_max)?),
        }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn k_max(&self) -> usize {
        self.fibers.len() - 1
    }

    pub fn fiber(&self, k: usize) -> Result<&Fiber> {
        self.fibers.get(k).ok_or_else(|| Error::Domain(format!("fiber {k} beyond k_max {}", self.k_max())))
    }

    pub fn fiber_dims(&self) -> Vec<usize> {
        self.fibers.iter().map(|f| f.dim()).collect()
    }

    pub fn vacuum(&self, k: usize) -> Vec<C64> {
        let mut v = vec![zero(); self.ambient.dim(k)];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// `U_{j,k}(xi (x) eta)`.
    pub fn product(&self, j: usize, k: usize, xi: &[C64], eta: &[C64]) -> Result<Vec<C64>> {
        let amb = &self.ambient;
        if xi.len() != amb.dim(j) || eta.len() != amb.dim(k) {
            return crate::error::dimension(format!("product of lengths {} and {} at ({j}, {k})", xi.len(), eta.len()));
        }
        let mut out = vec![zero(); amb.dim(j + k)];
        for (a, x) in xi.iter().enumerate().filter(|(_, x)| **x != zero()) {
            for (b, y) in eta.iter().enumerate().filter(|(_, y)| **y != zero()) {
                match amb.basis_product(j, k, a, b) {
                    Some(r) => out[r] += x * y,
                    None => return Err(Error::Truncation(format!("product at ({j}, {k}) leaves the truncated ambient space"))),
                }
            }
        }
        Ok(out)
    }

    /// `U(Omega_before (x) x (x) Omega_after)` where `x` spans `len` cells.
    pub fn place(&self, before: usize, x: &[C64], len: usize, after: usize) -> Result<Vec<C64>> {
        let right = self.product(len, after, x, &self.vacuum(after))?;
        self.product(before, len + after, &self.vacuum(before), &right)
    }

    /// Largest isometry and closure defect of the product on sampled fiber
    /// frames, including vacuum multiplicativity.
    fn product_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let km = self.k_max();
        for j in 0..=km {
            for k in 0..=km - j {
                let om = self.product(j, k, &self.vacuum(j), &self.vacuum(k))?;
                worst = worst.max(dist(&om, &self.vacuum(j + k)));
                let (fj, fk, fjk) = (&self.fibers[j], &self.fibers[k], &self.fibers[j + k]);
                let mut imgs: Vec<Vec<(usize, C64)>> = Vec::new();
                for a in 0..fj.dim().min(SAMPLE_COLS) {
                    for b in 0..fk.dim().min(SAMPLE_COLS) {
                        let v = self.product(j, k, &fj.vector(a), &fk.vector(b))?;
                        if !matches!(fjk, Fiber::Full(_)) {
                            worst = worst.max(fjk.residual(&v));
                        }
                        imgs.push(v.into_iter().enumerate().filter(|(_, x)| *x != zero()).collect());
                    }
                }
                // images are sparse, so their Gram matrix is formed on supports
                let sparse_inner = |v: &[(usize, C64)], w: &[(usize, C64)]| -> C64 {
                    let mut s = zero();
                    let (mut p, mut q) = (0, 0);
                    while p < v.len() && q < w.len() {
                        match v[p].0.cmp(&w[q].0) {
                            std::cmp::Ordering::Less => p += 1,
                            std::cmp::Ordering::Greater => q += 1,
                            std::cmp::Ordering::Equal => {
                                s += v[p].1.conj() * w[q].1;
                                p += 1;
                                q += 1;
                            }
                        }
                    }
                    s
                };
                for (p, x) in imgs.iter().enumerate() {
                    for (q, y) in imgs.iter().enumerate().skip(p) {
                        let want = if p == q { 1.0 } else { 0.0 };
                        worst = worst.max((sparse_inner(x, y) - C64::new(want, 0.0)).norm());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Random unit vector in fiber `k`.
    pub fn random_vector(&self, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<C64>> {
        let mut v = vec![zero(); self.ambient.dim(k)];
        match self.fiber(k)? {
            Fiber::Full(_) => v.iter_mut().for_each(|x| *x = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            Fiber::Sub(f) => {
                for i in 0..f.dim() {
                    let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    for (r, x) in f.frame().column(i).iter().enumerate() {
                        v[r] += c * x;
                    }
                }
            }
        }
        let nv = crate::fock::norm(&v);
        if nv > 0.0 {
            v.iter_mut().for_each(|x| *x /= nv);
        }
        Ok(v)
    }

    /// `|U_{i,j+k}(x (x) U_{j,k}(y (x) z)) - U_{i+j,k}(U_{i,j}(x (x) y) (x) z)|`
    /// and the norm defect, for random fiber vectors.
    pub fn associativity_residual(&self, i: usize, j: usize, k: usize, seed: u64) -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = self.random_vector(i, &mut rng)?;
        let y = self.random_vector(j, &mut rng)?;
        let z = self.random_vector(k, &mut rng)?;
        let left = self.product(i, j + k, &x, &self.product(j, k, &y, &z)?)?;
        let right = self.product(i + j, k, &self.product(i, j, &x, &y)?, &z)?;
        let norm_defect = (crate::fock::norm(&left) - crate::fock::norm(&x) * crate::fock::norm(&y) * crate::fock::norm(&z)).abs();
        Ok((dist(&left, &right), norm_defect))
    }
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Grid addit generated by its one-cell value:
/// `b_k = sum_i U(Omega_i (x) b_cell (x) Omega_{k-1-i})`.
#[derive(Debug, Clone)]
pub struct AdditFamily {
    pub cell: Vec<C64>,
}

impl AdditFamily {
    pub fn new(sps: &SuperProductSystem, cell: Vec<C64>) -> Result<Self> {
        if sps.k_max() < 1 {
            return domain("addits need fiber 1");
        }
        let f = sps.fiber(1)?;
        if cell.len() != f.ambient() {
            return crate::error::dimension(format!("cell value of length {} in ambient {}", cell.len(), f.ambient()));
        }
        if f.residual(&cell) > 1e-9 * (1.0 + crate::fock::norm(&cell)) {
            return domain("cell value is not in fiber 1");
        }
        Ok(Self { cell })
    }

    pub fn zero(sps: &SuperProductSystem) -> Self {
        Self { cell: vec![zero(); sps.ambient().dim(1)] }
    }

    pub fn is_centered(&self) -> bool {
        self.cell[0].norm() < 1e-12
    }

    pub fn value(&self, sps: &SuperProductSystem, k: usize) -> Result<Vec<C64>> {
        let mut out = vec![zero(); sps.ambient().dim(k)];
        for i in 0..k {
            let v = sps.place(i, &self.cell, 1, k - 1 - i)?;
            out.iter_mut().zip(&v).for_each(|(o, x)| *o += x);
        }
        Ok(out)
    }

    /// `|U(b_j (x) Omega_k) + U(Omega_j (x) b_k) - b_{j+k}|`.
    pub fn law_residual(&self, sps: &SuperProductSystem, j: usize, k: usize) -> Result<f64> {
        let bj = self.value(sps, j)?;
        let bk = self.value(sps, k)?;
        let a = sps.product(j, k, &bj, &sps.vacuum(k))?;
        let b = sps.product(j, k, &sps.vacuum(j), &bk)?;
        let sum: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        Ok(dist(&sum, &self.value(sps, j + k)?))
    }
}

/// Unit values `u_0, ..., u_K`.
#[derive(Debug, Clone)]
pub struct UnitFamily {
    pub values: Vec<Vec<C64>>,
}

impl UnitFamily {
    pub fn vacuum(sps: &SuperProductSystem, k_max: usize) -> Self {
        Self { values: (0..=k_max).map(|k| sps.vacuum(k)).collect() }
    }

    /// `u_k = U(u_cell^{(x) k})`.
    pub fn from_cell(sps: &SuperProductSystem, cell: &[C64], k_max: usize) -> Result<Self> {
        let mut values = vec![sps.vacuum(0)];
        for k in 1..=k_max {
            let next = sps.product(k - 1, 1, &values[k - 1], cell)?;
            values.push(next);
        }
        Ok(Self { values })
    }

    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest `|U(u_j (x) u_k) - u_{j+k}|`.
    pub fn unit_residual(&self, sps: &SuperProductSystem) -> Result<f64> {
        let km = self.k_max();
        let mut worst: f64 = 0.0;
        for j in 0..=km {
            for k in 0..=km - j {
                let p = sps.product(j, k, &self.values[j], &self.values[k])?;
                worst = worst.max(dist(&p, &self.values[j + k]));
            }
        }
        Ok(worst)
    }

    /// Largest `|<Omega_k, u_k> - 1|`.
    pub fn exponential_defect(&self) -> f64 {
        self.values.iter().map(|v| (v[0] - C64::new(1.0, 0.0)).norm()).fold(0.0, f64::max)
    }
}

/// Exponent `c` of `<x_k, y_k> = e^{c k width}` with the residual of the
/// exponential law.
#[derive(Debug, Clone, Copy)]
pub struct Covariance {
    pub c: C64,
    pub residual: f64,
}

pub fn covariance(sps: &SuperProductSystem, x: &UnitFamily, y: &UnitFamily) -> Result<Covariance> {
    let km = x.k_max().min(y.k_max());
    if km == 0 {
        return domain("covariance needs at least one nontrivial time");
    }
    // log-linear fit through the origin with the phase unwrapped along k
    let mut logs = Vec::with_capacity(km);
    let mut prev_arg = 0.0;
    for k in 1..=km {
        let z = crate::fock::inner(&x.values[k], &y.values[k]);
        if z.norm() < 1e-300 {
            return Err(Error::Domain(format!("vanishing inner product at k = {k}")));
        }
        let mut arg = z.arg();
        while arg - prev_arg > std::f64::consts::PI {
            arg -= 2.0 * std::f64::consts::PI;
        }
        while arg - prev_arg < -std::f64::consts::PI {
            arg += 2.0 * std::f64::consts::PI;
        }
        prev_arg = arg;
        logs.push((k as f64 * sps.width(), C64::new(z.norm().ln(), arg)));
    }
    let tt: f64 = logs.iter().map(|(t, _)| t * t).sum();
    let c = logs.iter().map(|(t, l)| l * *t).sum::<C64>() / tt;
    let residual = logs.iter().map(|(t, l)| (l - c * *t).norm()).fold(0.0, f64::max);
    Ok(Covariance { c, residual })
}

/// One-cell values of refinement-consistent addits.
#[derive(Debug, Clone)]
pub struct AdditSpace {
    pub depth: u32,
    /// All consistent one-cell values, inside fiber 1.
    pub space: Subspace,
    /// The part orthogonal to the vacuum.
    pub centered: Subspace,
    /// Dimension of the consistent space after `l` halvings, `l = 1..=depth`.
    pub level_dims: Vec<usize>,
    pub gap: f64,
}

impl AdditSpace {
    /// Computed index: the centered dimension.
    pub fn index(&self) -> usize {
        self.centered.dim()
    }

    pub fn contains_vacuum(&self) -> bool {
        let mut om = vec![zero(); self.space.ambient()];
        om[0] = C64::new(1.0, 0.0);
        self.space.residual(&om) < 1e-8
    }
}

/// One-cell addit values `b` whose refinement over `2^l` subcells is itself
/// generated by a subcell value, for every `l <= depth`.
pub fn addit_space(sps: &SuperProductSystem, depth: u32) -> Result<AdditSpace> {
    if depth == 0 {
        return domain("refinement depth must be positive");
    }
    let coarse = sps.fiber(1)?.subspace();
    let d1 = coarse.ambient();
    let mut space = coarse.clone();
    let mut level_dims = Vec::new();
    let mut gap = f64::INFINITY;
    let mut fine = sps.clone();
    for level in 1..=depth {
        fine = fine.refine(1)?;
        let parts = 1usize << level;
        let r = sps.ambient().refinement_map(1, level)?;
        let f = fine.fiber(1)?.subspace();
        let (nb, nf) = (coarse.dim(), f.dim());
        let mut m = DMatrix::zeros(r.rows(), nb + nf);
        for c in 0..nb {
            let v = r.apply(&coarse.vector(c));
            m.set_column(c, &nalgebra::DVector::from_column_slice(&v));
        }
        for c in 0..nf {
            let gen = AdditFamily { cell: f.vector(c) };
            let v = gen.value(&fine, parts)?;
            let v: Vec<C64> = v.iter().map(|x| -x).collect();
            m.set_column(nb + c, &nalgebra::DVector::from_column_slice(&v));
        }
        let mut g = Gram::new(nb + nf);
        g.add_dense(&m);
        let null = g.nullspace(RANK_TOL);
        gap = gap.min(null.gap());
        let coeffs = null.basis.rows(0, nb).clone_owned();
        let level_space = Subspace::span(&(coarse.frame() * coeffs));
        level_dims.push(level_space.dim());
        space = space.intersect(&level_space);
    }
    let mut om = vec![zero(); d1];
    om[0] = C64::new(1.0, 0.0);
    let perp = Subspace::full(d1).minus(&Subspace::span_vecs(d1, &[om]));
    let centered = space.intersect(&perp);
    space.gap = gap;
    Ok(AdditSpace { depth, space, centered, level_dims, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(dim: usize, i: usize) -> Vec<C64> {
        let mut v = vec![zero(); dim];
        v[i] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn car_product_concatenates_masks() {
        let s = SuperProductSystem::car(2, 0.5, 3).unwrap();
        let v = s.product(1, 2, &e(4, 0b01), &e(16, 0b1010)).unwrap();
        assert_eq!(v, e(64, 0b101001));
        assert_eq!(s.fiber_dims(), vec![1, 4, 16, 64]);
        assert!(s.isometry_residual < 1e-12);
    }

    #[test]
    fn clifford_fibers_are_even() {
        let m = FlowModel::clifford(3, 1.0, 2).unwrap();
        let s = SuperProductSystem::from_flow(&m, 2).unwrap();
        assert_eq!(s.fiber_dims(), vec![1, 2, 8]);
        let ev = SuperProductSystem::from_flow(&FlowModel::even_clifford(3, 1.0, 2).unwrap(), 2).unwrap();
        for k in 0..=2 {
            assert!(s.fiber(k).unwrap().subspace().distance(&ev.fiber(k).unwrap().subspace()) < 1e-8);
        }
    }

    #[test]
    fn free_fibers_are_vacuum() {
        let m = FlowModel::free(2, 1.0, 2, 3).unwrap();
        let s = SuperProductSystem::from_flow(&m, 2).unwrap();
        assert_eq!(s.fiber_dims(), vec![1, 1, 1]);
        assert!(s.fiber(2).unwrap().residual(&s.vacuum(2)) < 1e-10);
    }

    #[test]
    fn addit_indices() {
        for n in 1..=2 {
            let s = SuperProductSystem::car(n, 1.0, 1).unwrap();
            let a = addit_space(&s, 2).unwrap();
            assert_eq!(a.index(), n);
            assert!(a.contains_vacuum());
        }
        let cl = SuperProductSystem::from_flow(&FlowModel::clifford(1, 1.0, 2).unwrap(), 1).unwrap();
        assert_eq!(addit_space(&cl, 2).unwrap().index(), 0);
        let tr = SuperProductSystem::trivial(1.0, 1).unwrap();
        let a = addit_space(&tr, 2).unwrap();
        assert_eq!((a.index(), a.space.dim()), (0, 1));
    }

    #[test]
    fn tensor_index_is_superadditive() {
        let a = SuperProductSystem::car(1, 1.0, 1).unwrap();
        let t = SuperProductSystem::tensor(&a, &a).unwrap();
        assert!(addit_space(&t, 2).unwrap().index() >= 2);
        let tt = SuperProductSystem::tensor(&SuperProductSystem::trivial(1.0, 2).unwrap(), &SuperProductSystem::trivial(1.0, 2).unwrap()).unwrap();
        assert_eq!(tt.fiber_dims(), vec![1, 1, 1]);
        assert!(SuperProductSystem::tensor(&a, &SuperProductSystem::trivial(0.5, 1).unwrap()).is_err());
    }

    #[test]
    fn covariance_of_vacuum_is_zero() {
        let s = SuperProductSystem::car(1, 0.25, 3).unwrap();
        let om = UnitFamily::vacuum(&s, 3);
        let c = covariance(&s, &om, &om).unwrap();
        assert!(c.c.norm() < 1e-14 && c.residual < 1e-14);
        let zero_unit = UnitFamily { values: vec![s.vacuum(0), vec![zero(); 2]] };
        assert!(covariance(&s, &zero_unit, &zero_unit).is_err());
    }

    #[test]
    fn addit_law_holds_for_cell_generated_addits() {
        let s = SuperProductSystem::car(2, 0.5, 4).unwrap();
        let b = AdditFamily::new(&s, vec![zero(), C64::new(0.3, 0.1), C64::new(-0.2, 0.0), C64::new(0.5, 0.0)]).unwrap();
        for j in 0..=2 {
            for k in 0..=2 {
                assert!(b.law_residual(&s, j, k).unwrap() < 1e-12);
            }
        }
        // <b_k, b_k> grows linearly for centered addits with no vacuum part
        let c = AdditFamily::new(&s, vec![zero(), C64::new(0.3, 0.1), C64::new(-0.2, 0.0), zero()]).unwrap();
        let n1 = crate::fock::inner(&c.value(&s, 1).unwrap(), &c.value(&s, 1).unwrap());
        for k in 1..=4 {
            let v = c.value(&s, k).unwrap();
            assert!((crate::fock::inner(&v, &v) - n1 * k as f64).norm() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn products_are_associative_and_isometric(seed in 0u64..1000, i in 0usize..3, j in 0usize..3, k in 0usize..3) {
            prop_assume!(i + j + k <= 4);
            let s = SuperProductSystem::car(1, 0.5, 4).unwrap();
            let (d, n) = s.associativity_residual(i, j, k, seed).unwrap();
            prop_assert!(d < 1e-12 && n < 1e-12);
        }

        #[test]
        fn fiber_dims_are_supermultiplicative(n in 1usize..3) {
            let s = SuperProductSystem::from_flow(&FlowModel::clifford(3, 1.0, n).unwrap(), 3).unwrap();
            let d = s.fiber_dims();
            for j in 0..=3 {
                for k in 0..=3 - j {
                    prop_assert!(d[j] * d[k] <= d[j + k]);
                }
            }
        }
    }
}
