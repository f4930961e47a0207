//! Change of basis between `x(I) Omega` and `l(I) Omega` on the full Fock
//! space, where `x(e) = l(e) + l(e)*` and `x(I) = x(e_{i_1}) ... x(e_{i_m})`.
//!
//! All coefficients are exact integers or rationals. The field used by the
//! free model is `s = x / 2`; [`cutoff_projection`] converts between the two.
//!
//! Three routes compute `x(I) Omega`: runs of equal letters with ballot
//! numbers ([`s_to_l`]), one letter at a time ([`s_to_l_letterwise`]) and
//! integer matrices ([`MatrixOracle`]).

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{domain, Result};
use crate::flows::{FlowKind, FlowModel};
use crate::fock::{free_word, word_index, FockSpace};
use crate::{Error, C64};

pub type Word = Vec<usize>;
/// Finitely supported integer coefficients indexed by words.
pub type WordCoeffs = BTreeMap<Word, i64>;
pub type RatCoeffs = BTreeMap<Word, Ratio<i64>>;

/// Longest word handled by the combinatorial routines.
pub const MAX_WORD: usize = 12;

fn check_len(w: &[usize]) -> Result<()> {
    if w.len() > MAX_WORD {
        return Err(Error::Budget(format!("word of length {} exceeds {MAX_WORD}", w.len())));
    }
    Ok(())
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Walks of `r` unit steps from height `p` to height `q` that never go
/// below zero.
pub fn ballot(r: usize, p: usize, q: usize) -> i64 {
    let (r, p, q) = (r as i64, p as i64, q as i64);
    if (r + q - p) % 2 != 0 || (q - p).abs() > r {
        return 0;
    }
    binom(r, (r + q - p) / 2) - binom(r, (r + q + p) / 2 + 1)
}

/// Maximal runs `(letter, length)` of a word.
pub fn runs(w: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &c in w {
        match out.last_mut() {
            Some((l, n)) if *l == c => *n += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

pub fn is_reduced(w: &[usize]) -> bool {
    w.windows(2).all(|p| p[0] != p[1])
}

fn add_to(map: &mut WordCoeffs, w: Word, c: i64) {
    if c == 0 {
        return;
    }
    *map.entry(w).or_insert(0) += c;
}

fn prune(map: WordCoeffs) -> WordCoeffs {
    map.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// `k(I, .)`: coefficients of `x(I) Omega` in the `l` basis, one run of
/// equal letters at a time. A run `a^r` acting on `l(a^p J) Omega` with `J`
/// not starting with `a` gives `sum_q ballot(r, p, q) l(a^q J) Omega`.
pub fn s_to_l(word: &[usize]) -> Result<WordCoeffs> {
    check_len(word)?;
    let mut state: WordCoeffs = BTreeMap::from([(vec![], 1)]);
    for &(a, r) in runs(word).iter().rev() {
        let mut next = WordCoeffs::new();
        for (w, c) in state {
            let p = w.iter().take_while(|&&x| x == a).count();
            let rest = &w[p..];
            for q in 0..=p + r {
                let n = ballot(r, p, q);
                if n != 0 {
                    let mut nw = vec![a; q];
                    nw.extend_from_slice(rest);
                    add_to(&mut next, nw, c * n);
                }
            }
        }
        state = prune(next);
    }
    Ok(state)
}

/// Same coefficients as [`s_to_l`], applying `x(e_a) l(W) Omega = l(aW) Omega
/// + [W starts with a] l(W') Omega` letter by letter.
pub fn s_to_l_letterwise(word: &[usize]) -> Result<WordCoeffs> {
    check_len(word)?;
    let mut state: WordCoeffs = BTreeMap::from([(vec![], 1)]);
    for &a in word.iter().rev() {
        let mut next = WordCoeffs::new();
        for (w, c) in state {
            if w.first() == Some(&a) {
                add_to(&mut next, w[1..].to_vec(), c);
            }
            let mut nw = vec![a];
            nw.extend(w);
            add_to(&mut next, nw, c);
        }
        state = prune(next);
    }
    Ok(state)
}

/// Integer matrices of `x(e_a) = l(e_a) + l(e_a)^T` on the full Fock space
/// over `letters` letters truncated at length `max_len`, stored densely.
pub struct MatrixOracle {
    letters: usize,
    max_len: usize,
    dim: usize,
    x: Vec<Vec<i64>>,
}

impl MatrixOracle {
    pub fn new(letters: usize, max_len: usize) -> Result<Self> {
        let space = FockSpace::Full { letters, max_len };
        space.check()?;
        let dim = space.dim();
        if dim > 4096 {
            return Err(Error::Budget(format!("matrix oracle of dimension {dim}")));
        }
        let mut x = Vec::with_capacity(letters);
        for a in 0..letters {
            let mut m = vec![0i64; dim * dim];
            for col in 0..dim {
                let mut w = space.word_at(col);
                if w.len() < max_len {
                    w.insert(0, a);
                    let row = word_index(letters, max_len, &w).unwrap();
                    // creation and its transpose, annihilation
                    m[row * dim + col] += 1;
                    m[col * dim + row] += 1;
                }
            }
            x.push(m);
        }
        Ok(Self { letters, max_len, dim, x })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `x(e_a) v` for an integer vector.
    pub fn apply(&self, a: usize, v: &[i64]) -> Vec<i64> {
        let m = &self.x[a];
        let mut out = vec![0i64; self.dim];
        for (col, &c) in v.iter().enumerate() {
            if c != 0 {
                for (row, o) in out.iter_mut().enumerate() {
                    *o += m[row * self.dim + col] * c;
                }
            }
        }
        out
    }

    /// `x(I) Omega` in the `l` basis.
    pub fn s_to_l(&self, word: &[usize]) -> Result<WordCoeffs> {
        if word.len() > self.max_len || word.iter().any(|&a| a >= self.letters) {
            return domain("word outside the oracle's range");
        }
        let mut v = vec![0i64; self.dim];
        v[0] = 1;
        for &a in word.iter().rev() {
            v = self.apply(a, &v);
        }
        let space = FockSpace::Full { letters: self.letters, max_len: self.max_len };
        Ok(v.into_iter().enumerate().filter(|(_, c)| *c != 0).map(|(i, c)| (space.word_at(i), c)).collect())
    }

    /// `sum_I mu(I) x(I) Omega` for rational `mu`, in the `l` basis.
    pub fn synthesize(&self, mu: &RatCoeffs) -> Result<RatCoeffs> {
        let mut out = RatCoeffs::new();
        for (w, c) in mu {
            for (lw, k) in self.s_to_l(w)? {
                *out.entry(lw).or_insert_with(Ratio::zero) += *c * Ratio::from_integer(k);
            }
        }
        Ok(out.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }
}

/// Memoized `k'` table: `l(I) Omega = sum_J k'(I, J) x(J) Omega`.
///
/// Since `x(I) Omega = l(I) Omega + (shorter words)`, the table is filled by
/// triangular back-substitution. Build it single-threaded; afterwards
/// `&FreeBasis` can be shared for reads.
#[derive(Default)]
pub struct FreeBasis {
    inverse: HashMap<Word, WordCoeffs>,
}

impl FreeBasis {
    pub fn new() -> Self {
        Self::default()
    }

    /// `k'(I, .)`.
    pub fn l_to_s(&mut self, word: &[usize]) -> Result<WordCoeffs> {
        check_len(word)?;
        if let Some(c) = self.inverse.get(word) {
            return Ok(c.clone());
        }
        let mut out: WordCoeffs = BTreeMap::from([(word.to_vec(), 1)]);
        for (w, k) in s_to_l(word)? {
            if w.as_slice() == word {
                if k != 1 {
                    return Err(Error::Construction(format!("leading coefficient {k} for {word:?}")));
                }
                continue;
            }
            for (v, c) in self.l_to_s(&w)? {
                add_to(&mut out, v, -k * c);
            }
        }
        let out = prune(out);
        self.inverse.insert(word.to_vec(), out.clone());
        Ok(out)
    }

    /// Read-only lookup after the table has been filled.
    pub fn cached(&self, word: &[usize]) -> Option<&WordCoeffs> {
        self.inverse.get(word)
    }

    /// Unique `x`-expansion `xi = sum_I mu(I) x(I) Omega` of a finite-particle
    /// vector given by its `l`-basis coefficients.
    pub fn expand_in_s(&mut self, xi: &RatCoeffs) -> Result<RatCoeffs> {
        let mut out = RatCoeffs::new();
        for (w, c) in xi {
            for (v, k) in self.l_to_s(w)? {
                *out.entry(v).or_insert_with(Ratio::zero) += *c * Ratio::from_integer(k);
            }
        }
        Ok(out.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// `sum_I k'(I', I) k(I, .)` for one `I'`; equals the indicator of `I'`.
    pub fn compose_ls(&mut self, word: &[usize]) -> Result<WordCoeffs> {
        let mut out = WordCoeffs::new();
        for (v, kp) in self.l_to_s(word)? {
            for (u, k) in s_to_l(&v)? {
                add_to(&mut out, u, kp * k);
            }
        }
        Ok(prune(out))
    }

    /// `sum_{I'} k(I, I') k'(I', .)` for one `I`; equals the indicator of `I`.
    pub fn compose_sl(&mut self, word: &[usize]) -> Result<WordCoeffs> {
        let mut out = WordCoeffs::new();
        for (v, k) in s_to_l(word)? {
            for (u, kp) in self.l_to_s(&v)? {
                add_to(&mut out, u, k * kp);
            }
        }
        Ok(prune(out))
    }
}

/// All words of length `<= max_len` over `letters` letters, shortest first.
pub fn all_words(letters: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Word> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..letters {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Whether `sub` is a subsequence of `w`.
pub fn is_subsequence(sub: &[usize], w: &[usize]) -> bool {
    let mut it = w.iter();
    sub.iter().all(|c| it.any(|x| x == c))
}

/// Entries of the run table `k^r_m` (coefficient of `l(i^r I) Omega` in
/// `x(i^m I) Omega`) that violate a literal reading of the printed recursions
/// `k^{2r+1}_{2m+1} = k^{2r+2}_{2m} + k^{2r}_{2m}` and
/// `k^{2r}_{2m} = k^{2r+1}_{2m+1} + k^{2r-1}_{2m}`, with the table defined by
/// [`ballot`]. Returns `(relation, m, r)` triples.
pub fn printed_recursion_mismatches(m_max: usize) -> Vec<(u8, usize, usize)> {
    let k = |r: i64, m: i64| if r < 0 || m < 0 { 0 } else { ballot(m as usize, 0, r as usize) };
    let mut out = Vec::new();
    for m in 0..=m_max as i64 {
        for r in 0..=m {
            if k(2 * r + 1, 2 * m + 1) != k(2 * r + 2, 2 * m) + k(2 * r, 2 * m) {
                out.push((1, m as usize, r as usize));
            }
            if k(2 * r, 2 * m) != k(2 * r + 1, 2 * m + 1) + k(2 * r - 1, 2 * m) {
                out.push((2, m as usize, r as usize));
            }
        }
    }
    out
}

/// A polynomial in the fields `s(e_a)`: word -> rational coefficient.
pub type SPoly = RatCoeffs;

/// Result of [`cutoff_projection`].
#[derive(Debug, Clone)]
pub struct Cutoff {
    /// `m_n` as a polynomial in the fields `s`.
    pub poly: SPoly,
    /// `|m_n Omega - P_n(m Omega)|` evaluated with the free model's operators.
    pub residual: f64,
}

fn pow2(e: i64) -> Ratio<i64> {
    if e >= 0 {
        Ratio::from_integer(1i64 << e)
    } else {
        Ratio::new(1, 1i64 << (-e))
    }
}

/// Element `m_n` with `m_n Omega = P_n(m Omega)`, where `P_n` keeps words of
/// length `<= n` and `m` is a polynomial in the fields `s = x / 2` of the
/// free model. The coefficients are exact; the returned residual checks them
/// against the model's own field operators.
pub fn cutoff_projection(basis: &mut FreeBasis, model: &FlowModel, m: &SPoly, n: usize) -> Result<Cutoff> {
    if model.kind != FlowKind::Free {
        return domain("cutoff projection is defined for the free model");
    }
    let space = model.space(model.cells());
    let letters = space.modes();
    for w in m.keys() {
        if w.iter().any(|&a| a >= letters) {
            return domain(format!("word {w:?} uses letters beyond {letters}"));
        }
        if w.len() > model.max_len {
            return Err(Error::Truncation(format!("word {w:?} longer than the model's length {}", model.max_len)));
        }
    }
    // l-basis coefficients of P_n(m Omega), then back to s-words
    let mut projected = RatCoeffs::new();
    for (w, c) in m {
        let scale = *c * pow2(-(w.len() as i64));
        for (lw, k) in s_to_l(w)? {
            if lw.len() <= n {
                *projected.entry(lw).or_insert_with(Ratio::zero) += scale * Ratio::from_integer(k);
            }
        }
    }
    let in_x = basis.expand_in_s(&projected)?;
    let poly: SPoly = in_x.into_iter().map(|(w, c)| {
        let e = w.len() as i64;
        (w, c * pow2(e))
    }).filter(|(_, c)| !c.is_zero()).collect();

    let to_f = |r: &Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    let dim = space.dim();
    let mut omega = vec![C64::new(0.0, 0.0); dim];
    omega[0] = C64::new(1.0, 0.0);
    let eval = |p: &SPoly| -> Result<Vec<C64>> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        for (w, c) in p {
            let x = free_word(space, w)?.apply(&omega);
            v.iter_mut().zip(&x).for_each(|(a, b)| *a += b * to_f(c));
        }
        Ok(v)
    };
    let target: Vec<C64> =
        eval(m)?.into_iter().enumerate().map(|(i, c)| if space.particles(i) <= n { c } else { C64::new(0.0, 0.0) }).collect();
    let got = eval(&poly)?;
    let residual = got.iter().zip(&target).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    Ok(Cutoff { poly, residual })
}

/// Single-word polynomial `1 * s(I)`.
pub fn monomial(word: &[usize]) -> SPoly {
    BTreeMap::from([(word.to_vec(), Ratio::one())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wc(pairs: &[(&[usize], i64)]) -> WordCoeffs {
        pairs.iter().map(|(w, c)| (w.to_vec(), *c)).collect()
    }

    #[test]
    fn ballot_values() {
        // Catalan numbers as returns to zero
        let cat = [1, 0, 1, 0, 2, 0, 5, 0, 14];
        for (r, &c) in cat.iter().enumerate() {
            assert_eq!(ballot(r, 0, 0), c);
        }
        assert_eq!(ballot(3, 0, 1), 2);
        assert_eq!(ballot(2, 1, 1), 2);
        assert_eq!(ballot(1, 0, 2), 0);
    }

    #[test]
    fn reduced_and_squared_words() {
        assert_eq!(s_to_l(&[0, 1, 0]).unwrap(), wc(&[(&[0, 1, 0], 1)]));
        assert_eq!(s_to_l(&[2, 2, 1, 0]).unwrap(), wc(&[(&[2, 2, 1, 0], 1), (&[1, 0], 1)]));
        assert_eq!(s_to_l(&[0, 0]).unwrap(), wc(&[(&[0, 0], 1), (&[], 1)]));
        let mut fb = FreeBasis::new();
        assert_eq!(fb.l_to_s(&[0, 0]).unwrap(), wc(&[(&[0, 0], 1), (&[], -1)]));
        assert_eq!(fb.l_to_s(&[1, 0, 1]).unwrap(), wc(&[(&[1, 0, 1], 1)]));
        // runs merge once an inner run is fully annihilated
        assert_eq!(s_to_l(&[0, 1, 1, 0]).unwrap(), wc(&[(&[0, 1, 1, 0], 1), (&[0, 0], 1), (&[], 1)]));
    }

    #[test]
    fn three_routes_agree() {
        let oracle = MatrixOracle::new(2, 5).unwrap();
        for w in all_words(2, 5) {
            let a = s_to_l(&w).unwrap();
            assert_eq!(a, s_to_l_letterwise(&w).unwrap());
            assert_eq!(a, oracle.s_to_l(&w).unwrap());
        }
    }

    #[test]
    fn matches_free_field_operators() {
        let space = FockSpace::Full { letters: 2, max_len: 4 };
        let w = [1, 1, 0, 0];
        let v = free_word(space, &w).unwrap().apply(&crate::fock::StateVec::vacuum(space).coeffs);
        for (lw, k) in s_to_l(&w).unwrap() {
            let idx = space.word_index(&lw).unwrap();
            assert!((v[idx].re * 16.0 - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn expansion_examples() {
        let mut fb = FreeBasis::new();
        assert_eq!(fb.expand_in_s(&monomial(&[])).unwrap(), monomial(&[]));
        assert_eq!(fb.expand_in_s(&monomial(&[0, 1])).unwrap(), monomial(&[0, 1]));
        let oracle = MatrixOracle::new(2, 4).unwrap();
        let xi: RatCoeffs = BTreeMap::from([(vec![0, 0, 1], Ratio::new(3, 2)), (vec![1], Ratio::new(-1, 3)), (vec![], Ratio::new(5, 7))]);
        let mu = fb.expand_in_s(&xi).unwrap();
        assert_eq!(oracle.synthesize(&mu).unwrap(), xi);
    }

    #[test]
    fn printed_recursion_first_relation_holds() {
        let bad = printed_recursion_mismatches(6);
        assert!(bad.iter().all(|&(rel, _, _)| rel == 2));
        assert!(!bad.is_empty());
        // the vanishing rule gives k^1_2 = 0 and k^0_2 = 1
        assert_eq!((ballot(2, 0, 1), ballot(2, 0, 0)), (0, 1));
    }

    #[test]
    fn cutoff_examples() {
        let model = FlowModel::free(1, 1.0, 2, 4).unwrap();
        let mut fb = FreeBasis::new();
        let c = cutoff_projection(&mut fb, &model, &monomial(&[0]), 0).unwrap();
        assert!(c.poly.is_empty() && c.residual < 1e-14);
        let c = cutoff_projection(&mut fb, &model, &monomial(&[0, 0]), 0).unwrap();
        assert_eq!(c.poly, BTreeMap::from([(vec![], Ratio::new(1, 4))]));
        let c = cutoff_projection(&mut fb, &model, &monomial(&[1, 0, 0, 1]), 4).unwrap();
        assert_eq!(c.poly, monomial(&[1, 0, 0, 1]));
        let c = cutoff_projection(&mut fb, &model, &monomial(&[1, 0, 0, 1]), 2).unwrap();
        assert!(c.residual < 1e-13);
    }

    proptest! {
        #[test]
        fn biorthogonal_and_parity(w in proptest::collection::vec(0usize..3, 0..7)) {
            let mut fb = FreeBasis::new();
            let one = BTreeMap::from([(w.clone(), 1)]);
            prop_assert_eq!(fb.compose_ls(&w).unwrap(), one.clone());
            prop_assert_eq!(fb.compose_sl(&w).unwrap(), one);
            for (v, k) in s_to_l(&w).unwrap() {
                prop_assert!(k > 0);
                prop_assert_eq!((w.len() - v.len()) % 2, 0);
                prop_assert!(is_subsequence(&v, &w));
            }
            if is_reduced(&w) {
                prop_assert_eq!(fb.l_to_s(&w).unwrap(), BTreeMap::from([(w.clone(), 1)]));
            }
        }
    }
}
