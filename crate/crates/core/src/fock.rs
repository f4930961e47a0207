//! Antisymmetric and full Fock spaces over finitely many modes, with the
//! creation, field and second-quantized operators acting on them.
//!
//! Antisymmetric basis vectors are bitmasks of occupied modes, ordered
//! wedge products `e_{p_1} ^ ... ^ e_{p_k}` with `p_1 < ... < p_k`. Full Fock
//! basis vectors are words `e_{w_1} (x) ... (x) e_{w_k}` of length at most
//! `max_len`, listed by length and then lexicographically.

use nalgebra::DMatrix;

use crate::error::{dimension, domain, Result};
use crate::onepart::GridFn;
use crate::sparse::SparseOp;
use crate::C64;

const MAX_MODES: usize = 30;

/// A finite Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FockSpace {
    /// Antisymmetric Fock space over `modes` modes, dimension `2^modes`.
    Antisymmetric { modes: usize },
    /// Even-particle subspace of the antisymmetric Fock space.
    Even { modes: usize },
    /// Full Fock space over `letters` modes, words of length `<= max_len`.
    Full { letters: usize, max_len: usize },
}

impl FockSpace {
    pub fn dim(&self) -> usize {
        match *self {
            FockSpace::Antisymmetric { modes } => 1 << modes,
            FockSpace::Even { modes } => {
                if modes == 0 {
                    1
                } else {
                    1 << (modes - 1)
                }
            }
            FockSpace::Full { letters, max_len } => word_offset(letters, max_len + 1),
        }
    }

    /// Number of one-particle modes.
    pub fn modes(&self) -> usize {
        match *self {
            FockSpace::Antisymmetric { modes } | FockSpace::Even { modes } => modes,
            FockSpace::Full { letters, .. } => letters,
        }
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            FockSpace::Antisymmetric { modes } | FockSpace::Even { modes } if modes > MAX_MODES => {
                Err(crate::Error::Budget(format!("{modes} modes exceed the limit {MAX_MODES}")))
            }
            FockSpace::Full { letters, max_len } => {
                let mut total: f64 = 0.0;
                for l in 0..=max_len {
                    total += (letters as f64).powi(l as i32);
                }
                if total > 5.0e6 {
                    Err(crate::Error::Budget(format!("full Fock space with {letters} letters and length {max_len} is too large")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Basis index of an antisymmetric bitmask. `None` for odd masks in the
    /// even space or out-of-range modes.
    pub fn mask_index(&self, mask: usize) -> Option<usize> {
        match *self {
            FockSpace::Antisymmetric { modes } => (mask >> modes == 0).then_some(mask),
            FockSpace::Even { modes } => (mask >> modes == 0 && mask.count_ones().is_multiple_of(2)).then_some(mask >> 1),
            FockSpace::Full { .. } => None,
        }
    }

    /// Bitmask of the basis vector with index `idx` in an antisymmetric space.
    pub fn mask_at(&self, idx: usize) -> usize {
        match *self {
            FockSpace::Antisymmetric { .. } => idx,
            FockSpace::Even { .. } => {
                let upper = idx << 1;
                upper | (upper.count_ones() as usize & 1)
            }
            FockSpace::Full { .. } => panic!("mask_at on a full Fock space"),
        }
    }

    pub fn word_index(&self, w: &[usize]) -> Option<usize> {
        match *self {
            FockSpace::Full { letters, max_len } => word_index(letters, max_len, w),
            _ => None,
        }
    }

    pub fn word_at(&self, idx: usize) -> Vec<usize> {
        match *self {
            FockSpace::Full { letters, .. } => word_at(letters, idx),
            _ => panic!("word_at on an antisymmetric space"),
        }
    }

    /// Particle number of a basis vector.
    pub fn particles(&self, idx: usize) -> usize {
        match self {
            FockSpace::Full { .. } => self.word_at(idx).len(),
            _ => self.mask_at(idx).count_ones() as usize,
        }
    }
}

/// `sum_{l < len} letters^l`, the index of the first word of length `len`.
pub fn word_offset(letters: usize, len: usize) -> usize {
    let mut total = 0;
    let mut pow = 1;
    for _ in 0..len {
        total += pow;
        pow *= letters;
    }
    total
}

pub fn word_index(letters: usize, max_len: usize, w: &[usize]) -> Option<usize> {
    if w.len() > max_len || w.iter().any(|&c| c >= letters) {
        return None;
    }
    let mut v = 0;
    for &c in w {
        v = v * letters + c;
    }
    Some(word_offset(letters, w.len()) + v)
}

pub fn word_at(letters: usize, idx: usize) -> Vec<usize> {
    let mut len = 0;
    while word_offset(letters, len + 1) <= idx {
        len += 1;
    }
    let mut v = idx - word_offset(letters, len);
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = v % letters;
        v /= letters;
    }
    w
}

/// Vector in a Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    pub space: FockSpace,
    pub coeffs: Vec<C64>,
}

impl StateVec {
    pub fn new(space: FockSpace, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return dimension(format!("{} coefficients for a space of dimension {}", coeffs.len(), space.dim()));
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: FockSpace) -> Self {
        Self { space, coeffs: vec![C64::new(0.0, 0.0); space.dim()] }
    }

    pub fn basis(space: FockSpace, idx: usize) -> Self {
        let mut v = Self::zero(space);
        v.coeffs[idx] = C64::new(1.0, 0.0);
        v
    }

    pub fn vacuum(space: FockSpace) -> Self {
        Self::basis(space, 0)
    }

    pub fn inner(&self, other: &StateVec) -> C64 {
        assert_eq!(self.space, other.space);
        inner(&self.coeffs, &other.coeffs)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coeffs)
    }

    pub fn apply(&self, op: &SparseOp) -> StateVec {
        StateVec { space: self.space, coeffs: op.apply(&self.coeffs) }
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `(-1)^{#occupied modes below p}`.
fn wedge_sign(mask: usize, p: usize) -> f64 {
    if (mask & ((1usize << p) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Creation operator `a*(f)` for mode coefficients `f` on an antisymmetric
/// space, or the left creation `l(f)` on a full space (truncated at
/// `max_len`, with spill recorded).
pub fn create(space: FockSpace, f: &[C64]) -> Result<SparseOp> {
    if f.len() > space.modes() {
        return dimension(format!("{} coefficients for {} modes", f.len(), space.modes()));
    }
    let dim = space.dim();
    let mut t = Vec::new();
    match space {
        FockSpace::Antisymmetric { .. } => {
            for mask in 0..dim {
                for (p, &c) in f.iter().enumerate() {
                    if c != C64::new(0.0, 0.0) && mask & (1 << p) == 0 {
                        t.push((mask | (1 << p), mask, c * wedge_sign(mask, p)));
                    }
                }
            }
            Ok(SparseOp::from_triplets(dim, dim, t))
        }
        FockSpace::Even { .. } => domain("creation does not preserve the even subspace"),
        FockSpace::Full { letters, max_len } => {
            let fsq: f64 = f.iter().map(|c| c.norm_sqr()).sum();
            let mut spill = vec![0.0; dim];
            for (col, s) in spill.iter_mut().enumerate() {
                let w = word_at(letters, col);
                if w.len() == max_len {
                    *s = fsq;
                    continue;
                }
                for (p, &c) in f.iter().enumerate() {
                    if c != C64::new(0.0, 0.0) {
                        let mut nw = Vec::with_capacity(w.len() + 1);
                        nw.push(p);
                        nw.extend_from_slice(&w);
                        t.push((word_index(letters, max_len, &nw).unwrap(), col, c));
                    }
                }
            }
            Ok(SparseOp::from_triplets(dim, dim, t).with_spill(spill))
        }
    }
}

/// Annihilation operator `a(f)` (or `l(f)*`), the adjoint of [`create`].
pub fn annihilate(space: FockSpace, f: &[C64]) -> Result<SparseOp> {
    Ok(create(space, f)?.adjoint())
}

/// Creation by a single orthonormal mode.
pub fn create_mode(space: FockSpace, p: usize) -> Result<SparseOp> {
    if p >= space.modes() {
        return domain(format!("mode {p} out of range {}", space.modes()));
    }
    let mut f = vec![C64::new(0.0, 0.0); p + 1];
    f[p] = one();
    create(space, &f)
}

/// Field operator for real mode coefficients. On antisymmetric spaces this is
/// `u(f) = (a(f) + a*(f)) / sqrt 2`, on full spaces `s(f) = (l(f) + l(f)*) / 2`.
pub fn field(space: FockSpace, f: &[C64]) -> Result<SparseOp> {
    if f.iter().any(|c| c.im != 0.0) {
        return domain("field operators need a real one-particle vector");
    }
    let space_full = match space {
        FockSpace::Even { modes } => FockSpace::Antisymmetric { modes },
        s => s,
    };
    let a = create(space_full, f)?;
    let scale = match space {
        FockSpace::Full { .. } => 0.5,
        _ => std::f64::consts::FRAC_1_SQRT_2,
    };
    let spill = a.spill().map(|s| s.iter().map(|w| w * scale * scale).collect::<Vec<_>>());
    let mut op = a.add(&a.adjoint()).scale(C64::new(scale, 0.0));
    if let Some(s) = spill {
        op = op.with_spill(s);
    }
    if let FockSpace::Even { .. } = space {
        return domain("a single field operator does not preserve the even subspace");
    }
    Ok(op)
}

pub fn field_mode(space: FockSpace, p: usize) -> Result<SparseOp> {
    if p >= space.modes() {
        return domain(format!("mode {p} out of range {}", space.modes()));
    }
    let mut f = vec![C64::new(0.0, 0.0); p + 1];
    f[p] = one();
    field(space, &f)
}

/// Clifford field `u(f)` of a grid function on `Antisymmetric { modes: grid.dim() }`.
pub fn clifford(f: &GridFn) -> Result<SparseOp> {
    if !f.is_real() {
        return domain("Clifford field of a complex-flagged function");
    }
    field(FockSpace::Antisymmetric { modes: f.grid().dim() }, &f.modes())
}

/// Free semicircular field `s(f)` of a grid function, truncated at `max_len`.
pub fn free_field(f: &GridFn, max_len: usize) -> Result<SparseOp> {
    if !f.is_real() {
        return domain("free field of a complex-flagged function");
    }
    field(FockSpace::Full { letters: f.grid().dim(), max_len }, &f.modes())
}

/// Product `u(e_{i_1}) ... u(e_{i_k})` of single-mode Clifford fields.
pub fn clifford_word(space: FockSpace, word: &[usize]) -> Result<SparseOp> {
    let full = FockSpace::Antisymmetric { modes: space.modes() };
    let mut op = SparseOp::identity(full.dim());
    for &p in word {
        op = op.mul(&field_mode(full, p)?);
    }
    match space {
        FockSpace::Antisymmetric { .. } => Ok(op),
        FockSpace::Even { .. } => {
            if word.len() % 2 == 1 {
                return domain("odd Clifford word on the even subspace");
            }
            Ok(restrict_even(&op, space.modes()))
        }
        FockSpace::Full { .. } => domain("Clifford word on a full Fock space"),
    }
}

/// Product `s(e_{i_1}) ... s(e_{i_k})` of truncated free fields.
pub fn free_word(space: FockSpace, word: &[usize]) -> Result<SparseOp> {
    let mut op = SparseOp::identity(space.dim());
    for &p in word {
        op = op.mul(&field_mode(space, p)?);
    }
    Ok(op)
}

pub fn even_indices(modes: usize) -> Vec<usize> {
    (0..1usize << modes).filter(|m| m.count_ones() % 2 == 0).collect()
}

/// Compression of a parity-preserving operator to the even subspace.
pub fn restrict_even(op: &SparseOp, modes: usize) -> SparseOp {
    let idx = even_indices(modes);
    op.select(&idx, &idx)
}

/// Isometric inclusion of a smaller space into a larger one of the same kind,
/// identifying basis vectors with the same mask or word.
pub fn embedding(from: FockSpace, to: FockSpace) -> Result<SparseOp> {
    shift_operator(from, to, 0)
}

/// Second quantization of the mode translation `p -> p + offset`, mapping
/// `from` into `to`.
pub fn shift_operator(from: FockSpace, to: FockSpace, offset: usize) -> Result<SparseOp> {
    let mut t = Vec::new();
    match (from, to) {
        (FockSpace::Antisymmetric { modes: a }, FockSpace::Antisymmetric { modes: b })
        | (FockSpace::Even { modes: a }, FockSpace::Even { modes: b }) => {
            if a + offset > b {
                return Err(crate::Error::Truncation(format!("{a} modes shifted by {offset} exceed {b}")));
            }
            for i in 0..from.dim() {
                let mask = from.mask_at(i);
                t.push((to.mask_index(mask << offset).unwrap(), i, one()));
            }
        }
        (FockSpace::Full { letters: a, max_len: la }, FockSpace::Full { letters: b, max_len: lb }) => {
            if a + offset > b || la > lb {
                return Err(crate::Error::Truncation(format!("full Fock space ({a}, {la}) does not fit into ({b}, {lb})")));
            }
            for i in 0..from.dim() {
                let w: Vec<usize> = word_at(a, i).into_iter().map(|c| c + offset).collect();
                t.push((word_index(b, lb, &w).unwrap(), i, one()));
            }
        }
        _ => return domain("shift between Fock spaces of different kinds"),
    }
    Ok(SparseOp::from_triplets(to.dim(), from.dim(), t))
}

/// Second quantization `Gamma(V)` of an isometry `V` between mode spaces,
/// on antisymmetric Fock spaces. Matrix elements are minors of `V`.
pub fn second_quantize(v: &DMatrix<C64>) -> Result<SparseOp> {
    let (d2, d1) = v.shape();
    if d1 > MAX_MODES || d2 > MAX_MODES {
        return Err(crate::Error::Budget("too many modes for second quantization".into()));
    }
    let mut t = Vec::new();
    for a in 0..1usize << d1 {
        let cols: Vec<usize> = (0..d1).filter(|p| a & (1 << p) != 0).collect();
        // expand the wedge product of the images column by column
        let mut terms: Vec<(usize, Vec<usize>, C64)> = vec![(0, vec![], one())];
        for &c in &cols {
            let mut next = Vec::new();
            for (mask, order, coeff) in &terms {
                for r in 0..d2 {
                    let x = v[(r, c)];
                    if x != C64::new(0.0, 0.0) && mask & (1 << r) == 0 {
                        let mut o = order.clone();
                        o.push(r);
                        next.push((mask | (1 << r), o, coeff * x));
                    }
                }
            }
            terms = next;
        }
        for (mask, order, coeff) in terms {
            t.push((mask, a, coeff * permutation_sign(&order)));
        }
    }
    Ok(SparseOp::from_triplets(1 << d2, 1 << d1, t))
}

/// Sign of the permutation sorting a list of distinct integers.
pub fn permutation_sign(order: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Antilinear operator `J xi = K conj(xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiLinear {
    pub k: SparseOp,
}

impl AntiLinear {
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let c: Vec<C64> = x.iter().map(|v| v.conj()).collect();
        self.k.apply(&c)
    }

    /// `J X J` as a linear operator.
    pub fn conjugate(&self, x: &SparseOp) -> SparseOp {
        self.k.mul(&x.conj()).mul(&self.k.conj())
    }

    /// Right multiplication `J x* J`.
    pub fn right_mult(&self, x: &SparseOp) -> SparseOp {
        self.conjugate(&x.adjoint())
    }

    /// `J^2` as a linear operator.
    pub fn square(&self) -> SparseOp {
        self.k.mul(&self.k.conj())
    }
}

/// Modular conjugation of the vacuum on Clifford or free Fock spaces.
///
/// Clifford: `J(u(I) Omega) = (-1)^{|I|(|I|-1)/2} u(I) Omega` with conjugated
/// coefficients. Free: the word `e_{w_1} (x) ... (x) e_{w_k}` is reversed.
pub fn conjugation(space: FockSpace) -> AntiLinear {
    let dim = space.dim();
    let t: Vec<(usize, usize, C64)> = match space {
        FockSpace::Antisymmetric { .. } | FockSpace::Even { .. } => (0..dim)
            .map(|i| {
                let k = space.mask_at(i).count_ones() as usize;
                let s = if (k * k.saturating_sub(1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
                (i, i, C64::new(s, 0.0))
            })
            .collect(),
        FockSpace::Full { letters, max_len } => (0..dim)
            .map(|i| {
                let mut w = word_at(letters, i);
                w.reverse();
                (word_index(letters, max_len, &w).unwrap(), i, one())
            })
            .collect(),
    };
    AntiLinear { k: SparseOp::from_triplets(dim, dim, t) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onepart::Grid;

    fn anti(d: usize) -> FockSpace {
        FockSpace::Antisymmetric { modes: d }
    }

    #[test]
    fn creation_sign_convention() {
        let s = anti(2);
        let a1 = create_mode(s, 1).unwrap();
        let v = a1.apply(&StateVec::basis(s, 0b01).coeffs);
        assert_eq!(v[0b11], C64::new(-1.0, 0.0));
        let a0 = create_mode(s, 0).unwrap();
        let w = a0.apply(&StateVec::basis(s, 0b10).coeffs);
        assert_eq!(w[0b11], C64::new(1.0, 0.0));
    }

    #[test]
    fn car_relations_on_modes() {
        let s = anti(4);
        let id = SparseOp::identity(s.dim());
        for p in 0..4 {
            for q in 0..4 {
                let ap = annihilate(s, &unit(p)).unwrap();
                let aq_star = create_mode(s, q).unwrap();
                let anti = ap.mul(&aq_star).add(&aq_star.mul(&ap));
                let want = if p == q { id.clone() } else { SparseOp::zero(s.dim(), s.dim()) };
                assert!(anti.distance(&want) < 1e-14);
                let cp = create_mode(s, p).unwrap();
                assert!(cp.mul(&aq_star).add(&aq_star.mul(&cp)).frobenius() < 1e-14);
            }
        }
    }

    fn unit(p: usize) -> Vec<C64> {
        let mut f = vec![C64::new(0.0, 0.0); p + 1];
        f[p] = C64::new(1.0, 0.0);
        f
    }

    #[test]
    fn full_fock_indexing_roundtrip() {
        let s = FockSpace::Full { letters: 3, max_len: 3 };
        assert_eq!(s.dim(), 40);
        for i in 0..s.dim() {
            assert_eq!(s.word_index(&s.word_at(i)), Some(i));
        }
    }

    #[test]
    fn free_field_on_vacuum() {
        let s = FockSpace::Full { letters: 2, max_len: 3 };
        let s0 = field_mode(s, 0).unwrap();
        let om = StateVec::vacuum(s);
        let v = s0.apply(&om.coeffs);
        assert!((v[s.word_index(&[0]).unwrap()].re - 0.5).abs() < 1e-15);
        let v2 = s0.apply(&v);
        assert!((v2[s.word_index(&[0, 0]).unwrap()].re - 0.25).abs() < 1e-15);
        assert!((v2[0].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn free_truncation_records_leakage() {
        let s = FockSpace::Full { letters: 2, max_len: 2 };
        let l0 = create_mode(s, 0).unwrap();
        let top = StateVec::basis(s, s.word_index(&[1, 1]).unwrap());
        assert!((l0.leakage(&top.coeffs) - 1.0).abs() < 1e-15);
        assert!(l0.leakage(&StateVec::vacuum(s).coeffs) == 0.0);
    }

    #[test]
    fn clifford_field_rejects_complex() {
        let g = Grid::new(2, 0.5, 1).unwrap();
        let f = GridFn::from_complex(g, vec![C64::new(1.0, 1.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(clifford(&f).is_err());
    }

    #[test]
    fn clifford_square_is_half_norm() {
        let g = Grid::new(3, 0.25, 1).unwrap();
        let f = GridFn::from_real(g, &[1.0, -2.0, 0.5]).unwrap();
        let u = clifford(&f).unwrap();
        let want = SparseOp::identity(8).scale(C64::new(f.norm_sq() / 2.0, 0.0));
        assert!(u.mul(&u).distance(&want) < 1e-13);
    }

    #[test]
    fn conjugation_is_involutive() {
        for s in [anti(4), FockSpace::Even { modes: 4 }, FockSpace::Full { letters: 2, max_len: 3 }] {
            let j = conjugation(s);
            assert!(j.square().distance(&SparseOp::identity(s.dim())) < 1e-15);
        }
    }

    #[test]
    fn second_quantized_permutation_matches_shift() {
        let mut v = DMatrix::zeros(4, 2);
        v[(2, 0)] = C64::new(1.0, 0.0);
        v[(3, 1)] = C64::new(1.0, 0.0);
        let g = second_quantize(&v).unwrap();
        let s = shift_operator(anti(2), anti(4), 2).unwrap();
        assert!(g.distance(&s) < 1e-15);
    }

    #[test]
    fn even_index_roundtrip() {
        let s = FockSpace::Even { modes: 5 };
        for i in 0..s.dim() {
            let m = s.mask_at(i);
            assert_eq!(m.count_ones() % 2, 0);
            assert_eq!(s.mask_index(m), Some(i));
        }
    }
}
