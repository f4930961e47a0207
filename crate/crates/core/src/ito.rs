//! Discrete Itô calculus on a super product system: adapted processes, the
//! Itô integral against a centered addit, Exp by two routes and dyadic Log.
//!
//! Times are integer cell counts. On a fixed grid the product unit and the
//! Picard series coincide once the series has as many terms as cells, so
//! convergence in the cell width is measured between neighbouring grids.

use crate::error::{domain, Result};
use crate::fock::{inner, norm};
use crate::onepart::GridFn;
use crate::sps::{Ambient, AdditFamily, SuperProductSystem, UnitFamily};
use crate::{Error, C64};

/// Tolerance of the structural checks on general integrands.
pub const INTEGRAND_TOL: f64 = 1e-9;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn axpy(out: &mut [C64], a: C64, x: &[C64]) {
    out.iter_mut().zip(x).for_each(|(o, v)| *o += a * v);
}

fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProcessKind {
    /// Frozen values at the breakpoints, extended by the vacuum in between.
    Simple { breakpoints: Vec<usize> },
    General,
}

/// Adapted process: `values[k]` lies in fiber `k`.
#[derive(Debug, Clone)]
pub struct AdaptedProcess {
    pub values: Vec<Vec<C64>>,
    pub kind: ProcessKind,
}

impl AdaptedProcess {
    /// `x_k = U(x_i (x) Omega_{k - s_i})` for `s_i <= k < s_{i+1}`, up to `k_max`.
    pub fn simple(sps: &SuperProductSystem, breakpoints: Vec<usize>, frozen: Vec<Vec<C64>>, k_max: usize) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints[0] != 0 || breakpoints.len() != frozen.len() {
            return domain("breakpoints must start at 0 and match the frozen values");
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || *breakpoints.last().unwrap() > k_max {
            return domain("breakpoints must increase within the grid");
        }
        for (&s, x) in breakpoints.iter().zip(&frozen) {
            let f = sps.fiber(s)?;
            if x.len() != f.ambient() || f.residual(x) > 1e-9 * (1.0 + norm(x)) {
                return domain(format!("frozen value at {s} is not in its fiber"));
            }
        }
        let mut values = Vec::with_capacity(k_max + 1);
        let mut piece = 0;
        for k in 0..=k_max {
            while piece + 1 < breakpoints.len() && breakpoints[piece + 1] <= k {
                piece += 1;
            }
            let s = breakpoints[piece];
            values.push(sps.product(s, k - s, &frozen[piece], &sps.vacuum(k - s))?);
        }
        Ok(Self { values, kind: ProcessKind::Simple { breakpoints } })
    }

    pub fn general(values: Vec<Vec<C64>>) -> Self {
        Self { values, kind: ProcessKind::General }
    }

    pub fn zero(sps: &SuperProductSystem, k_max: usize) -> Self {
        Self::general((0..=k_max).map(|k| vec![zero(); sps.ambient().dim(k)]).collect())
    }

    pub fn vacuum(sps: &SuperProductSystem, k_max: usize) -> Self {
        Self { values: (0..=k_max).map(|k| sps.vacuum(k)).collect(), kind: ProcessKind::Simple { breakpoints: vec![0] } }
    }

    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest `|<x_{s+t}, U(x_s (x) Omega_t)> - |x_s|^2|` relative to
    /// `1 + |x_s|^2`: the integrand condition with `F(t) = t`.
    pub fn integrand_defect(&self, sps: &SuperProductSystem) -> Result<f64> {
        let km = self.k_max();
        let mut worst: f64 = 0.0;
        for s in 0..=km {
            let xs = &self.values[s];
            let ns = inner(xs, xs).re;
            for t in 1..=km - s {
                let e = sps.product(s, t, xs, &sps.vacuum(t))?;
                let d = (inner(&self.values[s + t], &e) - C64::new(ns, 0.0)).norm() / (1.0 + ns);
                worst = worst.max(d);
            }
        }
        Ok(worst)
    }
}

/// One-cell addit value `f` placed in the one-particle space of fiber 1.
pub fn cell_addit(sps: &SuperProductSystem, f: &GridFn) -> Result<AdditFamily> {
    let g = f.grid();
    if g.cells != 1 || (g.width - sps.width()).abs() > 1e-12 * sps.width() {
        return domain("cell addits need a one-cell function at the system's width");
    }
    let modes = f.modes();
    let mut cell = vec![zero(); sps.ambient().dim(1)];
    match sps.ambient() {
        Ambient::Antisym { n } | Ambient::Full { n, .. } if *n == g.internal_dim => {
            let full = matches!(sps.ambient(), Ambient::Full { .. });
            for (j, c) in modes.iter().enumerate() {
                cell[if full { 1 + j } else { 1 << j }] = *c;
            }
        }
        _ => return domain("cell addits need an antisymmetric or full ambient of matching rank"),
    }
    AdditFamily::new(sps, cell)
}

fn check_centered(b: &AdditFamily) -> Result<()> {
    if !b.is_centered() {
        return domain("the addit is not centered");
    }
    Ok(())
}

/// Sum over cells `i in j..k` of `U(x_i (x) b_cell (x) Omega_{k-1-i})`.
fn integrate(sps: &SuperProductSystem, x: &AdaptedProcess, b: &AdditFamily, j: usize, k: usize) -> Result<Vec<C64>> {
    let mut out = vec![zero(); sps.ambient().dim(k)];
    for i in j..k {
        let right = sps.product(1, k - 1 - i, &b.cell, &sps.vacuum(k - 1 - i))?;
        let v = sps.product(i, k - i, &x.values[i], &right)?;
        axpy(&mut out, C64::new(1.0, 0.0), &v);
    }
    Ok(out)
}

/// `int_j^k x db` in fiber `k`.
///
/// General processes are accepted only when they satisfy the integrand
/// condition with `F(t) = t`; on the grid they are then integrated with
/// their cell-wise frozen approximation.
pub fn ito_integral(sps: &SuperProductSystem, x: &AdaptedProcess, b: &AdditFamily, j: usize, k: usize) -> Result<Vec<C64>> {
    check_centered(b)?;
    if j > k || k > x.k_max() || k > sps.k_max() {
        return domain(format!("range [{j}, {k}] outside the grid"));
    }
    if x.kind == ProcessKind::General {
        let d = x.integrand_defect(sps)?;
        if d > INTEGRAND_TOL {
            return domain(format!("process is not an integrand with F(t) = t (defect {d:.2e})"));
        }
    }
    integrate(sps, x, b, j, k)
}

/// The process `k -> int_0^k x db`, built by `I_k = U(I_{k-1} (x) Omega) + U(x_{k-1} (x) b_cell)`.
pub fn integral_process(sps: &SuperProductSystem, x: &AdaptedProcess, b: &AdditFamily) -> Result<AdaptedProcess> {
    check_centered(b)?;
    let km = x.k_max().min(sps.k_max());
    let mut values = vec![vec![zero(); 1]];
    for k in 1..=km {
        let mut v = sps.product(k - 1, 1, &values[k - 1], &sps.vacuum(1))?;
        axpy(&mut v, C64::new(1.0, 0.0), &sps.product(k - 1, 1, &x.values[k - 1], &b.cell)?);
        values.push(v);
    }
    Ok(AdaptedProcess::general(values))
}

/// `sum_i <x_i, y_i> |b_cell|^2` over `i in j..k`, the right side of the
/// discrete Itô isometry.
pub fn isometry_rhs(x: &AdaptedProcess, y: &AdaptedProcess, b: &AdditFamily, j: usize, k: usize) -> C64 {
    let nb = inner(&b.cell, &b.cell).re;
    (j..k).map(|i| inner(&x.values[i], &y.values[i]) * nb).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpMethod {
    /// `u_k = U((Omega + b_cell)^{(x) k})`.
    Product,
    /// `Omega + sum_{n <= N} x^n` with `x^1 = b`, `x^{n+1} = int x^n db`.
    Picard(usize),
}

/// Picard iterates `x^1, ..., x^N` as processes up to `k_max`.
pub fn picard_iterates(sps: &SuperProductSystem, b: &AdditFamily, k_max: usize, terms: usize) -> Result<Vec<AdaptedProcess>> {
    check_centered(b)?;
    let first = AdaptedProcess::general((0..=k_max).map(|k| b.value(sps, k)).collect::<Result<_>>()?);
    let mut out = vec![first];
    while out.len() < terms {
        let next = integral_process(sps, out.last().unwrap(), b)?;
        out.push(next);
    }
    out.truncate(terms);
    Ok(out)
}

pub fn exp_unit(sps: &SuperProductSystem, b: &AdditFamily, k_max: usize, method: ExpMethod) -> Result<UnitFamily> {
    check_centered(b)?;
    match method {
        ExpMethod::Product => {
            let mut cell = b.cell.clone();
            cell[0] += C64::new(1.0, 0.0);
            UnitFamily::from_cell(sps, &cell, k_max)
        }
        ExpMethod::Picard(terms) => {
            let mut values: Vec<Vec<C64>> = (0..=k_max).map(|k| sps.vacuum(k)).collect();
            for x in picard_iterates(sps, b, k_max, terms)? {
                for (v, xk) in values.iter_mut().zip(&x.values) {
                    axpy(v, C64::new(1.0, 0.0), xk);
                }
            }
            Ok(UnitFamily { values })
        }
    }
}

/// Dyadic Log at time `t` (cells) and depth `r`:
/// `sum_i U(Omega (x) ... (x) (u_c - Omega_c) (x) ... (x) Omega)` over the
/// `2^r` pieces of `c = t / 2^r` cells.
pub fn log_unit(sps: &SuperProductSystem, u: &UnitFamily, t: usize, depth: u32) -> Result<Vec<C64>> {
    let pieces = 1usize << depth;
    if !t.is_multiple_of(pieces) || t == 0 {
        return domain(format!("{t} cells do not split into {pieces} pieces"));
    }
    if t > u.k_max() {
        return domain(format!("time {t} beyond the unit's range {}", u.k_max()));
    }
    let c = t / pieces;
    if (u.values[c][0] - C64::new(1.0, 0.0)).norm() > 1e-12 {
        return domain("Log needs an exponential unit");
    }
    let piece = sub(&u.values[c], &sps.vacuum(c));
    let mut out = vec![zero(); sps.ambient().dim(t)];
    for i in 0..pieces {
        let v = sps.place(i * c, &piece, c, t - (i + 1) * c)?;
        axpy(&mut out, C64::new(1.0, 0.0), &v);
    }
    Ok(out)
}

/// Log at the deepest level: the addit generated by `u_1 - Omega_1`.
pub fn log_addit(sps: &SuperProductSystem, u: &UnitFamily) -> Result<AdditFamily> {
    if u.k_max() < 1 || (u.values[1][0] - C64::new(1.0, 0.0)).norm() > 1e-12 {
        return domain("Log needs an exponential unit with a first cell");
    }
    AdditFamily::new(sps, sub(&u.values[1], &sps.vacuum(1)))
}

/// Distance of a unit from the Exp image: `max_k |Exp(Log u)_k - u_k|`.
/// Grid units that are exactly multiplicative give zero; anything larger is
/// reported as an anomaly by the callers.
pub fn exp_image_defect(sps: &SuperProductSystem, u: &UnitFamily) -> Result<f64> {
    let b = log_addit(sps, u)?;
    let e = exp_unit(sps, &b, u.k_max(), ExpMethod::Product)?;
    Ok(e.values.iter().zip(&u.values).map(|(a, b)| norm(&sub(a, b))).fold(0.0, f64::max))
}

/// Effective squared norm `ln(1 + |b_cell|^2) / width`, the grid counterpart
/// of `|b_1|^2` in the structure equation.
pub fn effective_norm_sq(sps: &SuperProductSystem, b: &AdditFamily) -> f64 {
    inner(&b.cell, &b.cell).re.ln_1p() / sps.width()
}

/// Unital unit `e^{lambda k width} Exp(b)_k` with `Re lambda` fixed by the
/// structure equation and imaginary part `theta`.
pub fn unital_unit(sps: &SuperProductSystem, b: &AdditFamily, theta: f64, k_max: usize) -> Result<(UnitFamily, C64)> {
    let lambda = C64::new(-0.5 * effective_norm_sq(sps, b), theta);
    let e = exp_unit(sps, b, k_max, ExpMethod::Product)?;
    let values = e
        .values
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            let f = (lambda * (k as f64 * sps.width())).exp();
            v.into_iter().map(|x| x * f).collect()
        })
        .collect();
    Ok((UnitFamily { values }, lambda))
}

/// Recovered data of a unital unit: `lambda` from `<Omega, u_k> = e^{lambda k width}`,
/// the centered addit of the normalized unit, and the structure-equation
/// residual `|b|^2_eff + lambda + conj(lambda)`.
pub struct UnitalDecomposition {
    pub lambda: C64,
    pub addit: AdditFamily,
    pub structure_residual: f64,
    pub norm_defect: f64,
}

pub fn decompose_unital(sps: &SuperProductSystem, u: &UnitFamily) -> Result<UnitalDecomposition> {
    if u.k_max() < 1 {
        return domain("need at least one cell");
    }
    let z = u.values[1][0];
    if z.norm() < 1e-300 {
        return Err(Error::Domain("unit orthogonal to the vacuum".into()));
    }
    let lambda = z.ln() / sps.width();
    let normalized = UnitFamily {
        values: u.values.iter().enumerate().map(|(k, v)| {
            let f = (-lambda * (k as f64 * sps.width())).exp();
            v.iter().map(|x| x * f).collect()
        }).collect(),
    };
    let addit = log_addit(sps, &normalized)?;
    let structure_residual = (effective_norm_sq(sps, &addit) + 2.0 * lambda.re).abs();
    let norm_defect = u.values.iter().map(|v| (norm(v) - 1.0).abs()).fold(0.0, f64::max);
    Ok(UnitalDecomposition { lambda, addit, structure_residual, norm_defect })
}

/// `|R(x) - y|^2` for `x` on `sps` at `k` cells and `y` on the grid with
/// `2^levels` times finer cells.
pub fn two_level_discrepancy(sps: &SuperProductSystem, k: usize, x: &[C64], y: &[C64], levels: u32) -> Result<f64> {
    let r = sps.ambient().refinement_map(k, levels)?;
    let rx = r.apply(x);
    if rx.len() != y.len() {
        return crate::error::dimension("refined vector and fine vector differ in length");
    }
    Ok(rx.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum())
}

/// Residuals of the five structural properties of the integral for
/// processes `x`, `y` at times `s`, `t`:
/// vacuum orthogonality, interval additivity, the module property over past
/// factors, orthogonal increments and the integral of the vacuum.
#[derive(Debug, Clone, Copy)]
pub struct PropertyResiduals {
    pub vacuum_orthogonal: f64,
    pub additivity: f64,
    pub module: f64,
    pub increments: f64,
    pub vacuum_integral: f64,
}

impl PropertyResiduals {
    pub fn max(&self) -> f64 {
        [self.vacuum_orthogonal, self.additivity, self.module, self.increments, self.vacuum_integral]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn property_residuals(
    sps: &SuperProductSystem,
    x: &AdaptedProcess,
    y: &AdaptedProcess,
    b: &AdditFamily,
    s: usize,
    t: usize,
) -> Result<PropertyResiduals> {
    let end = s + t;
    let upper = sps.vacuum(t);
    let i_st = ito_integral(sps, x, b, s, end)?;
    let vacuum_orthogonal = inner(&sps.vacuum(end), &i_st).norm();

    let i_0s = ito_integral(sps, x, b, 0, s)?;
    let lifted = sps.product(s, t, &i_0s, &upper)?;
    let whole = ito_integral(sps, x, b, 0, end)?;
    let mut rhs = lifted.clone();
    axpy(&mut rhs, C64::new(1.0, 0.0), &i_st);
    let additivity = norm(&sub(&whole, &rhs));

    let mut z = Vec::with_capacity(end + 1);
    for r in 0..=end {
        z.push(if r < s { vec![zero(); sps.ambient().dim(r)] } else { sps.product(s, r - s, &x.values[s], &y.values[r - s])? });
    }
    let z = AdaptedProcess::general(z);
    let left = integrate(sps, &z, b, s, end)?;
    let right = sps.product(s, t, &x.values[s], &ito_integral(sps, y, b, 0, t)?)?;
    let module = norm(&sub(&left, &right));

    let increments = inner(&i_st, &lifted).norm();

    let om = AdaptedProcess::vacuum(sps, end);
    let iv = ito_integral(sps, &om, b, s, end)?;
    let bs = sps.product(s, t, &b.value(sps, s)?, &upper)?;
    let vacuum_integral = norm(&sub(&iv, &sub(&b.value(sps, end)?, &bs)));
    Ok(PropertyResiduals { vacuum_orthogonal, additivity, module, increments, vacuum_integral })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onepart::Grid;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn car(width: f64, k: usize) -> SuperProductSystem {
        SuperProductSystem::car(2, width, k).unwrap()
    }

    fn addit(sps: &SuperProductSystem, v: [f64; 2]) -> AdditFamily {
        let g = Grid::new(1, sps.width(), 2).unwrap();
        let f = GridFn::from_real(g, &v).unwrap();
        cell_addit(sps, &f).unwrap()
    }

    fn random_simple(sps: &SuperProductSystem, k_max: usize, rng: &mut ChaCha8Rng) -> AdaptedProcess {
        let mut bps = vec![0];
        for s in 1..k_max {
            if rng.gen_bool(0.4) {
                bps.push(s);
            }
        }
        let frozen = bps.iter().map(|&s| sps.random_vector(s, rng).unwrap()).collect();
        AdaptedProcess::simple(sps, bps, frozen, k_max).unwrap()
    }

    #[test]
    fn integral_of_vacuum_is_the_addit() {
        let s = car(0.5, 4);
        let b = addit(&s, [0.7, -0.2]);
        let om = AdaptedProcess::vacuum(&s, 4);
        for k in 0..=4 {
            let i = ito_integral(&s, &om, &b, 0, k).unwrap();
            let bk = b.value(&s, k).unwrap();
            assert!(norm(&sub(&i, &bk)) < 1e-14);
        }
        let z = ito_integral(&s, &AdaptedProcess::zero(&s, 4), &b, 0, 4).unwrap();
        assert!(norm(&z) == 0.0);
    }

    #[test]
    fn non_centered_addit_is_rejected() {
        let s = car(0.5, 2);
        let mut cell = vec![zero(); 4];
        cell[0] = C64::new(1.0, 0.0);
        let b = AdditFamily::new(&s, cell).unwrap();
        assert!(ito_integral(&s, &AdaptedProcess::vacuum(&s, 2), &b, 0, 2).is_err());
    }

    #[test]
    fn product_and_picard_agree_on_the_grid() {
        let s = car(0.25, 5);
        let b = addit(&s, [0.4, 0.9]);
        let p = exp_unit(&s, &b, 5, ExpMethod::Product).unwrap();
        let q = exp_unit(&s, &b, 5, ExpMethod::Picard(5)).unwrap();
        for k in 0..=5 {
            assert!(norm(&sub(&p.values[k], &q.values[k])) < 1e-13);
            let want = (1.0 + inner(&b.cell, &b.cell).re).powi(k as i32);
            assert!((inner(&p.values[k], &p.values[k]).re - want).abs() < 1e-12);
        }
        assert!(p.unit_residual(&s).unwrap() < 1e-13);
        assert!(p.exponential_defect() < 1e-15);
    }

    #[test]
    fn picard_iterates_are_graded() {
        let s = car(0.25, 4);
        let b = addit(&s, [0.4, 0.9]);
        let xs = picard_iterates(&s, &b, 4, 4).unwrap();
        for (n, x) in xs.iter().enumerate() {
            for y in xs.iter().skip(n + 1) {
                for a in 0..=4 {
                    for t in a..=4 {
                        let e = s.product(a, t - a, &x.values[a], &s.vacuum(t - a)).unwrap();
                        assert!(inner(&e, &y.values[t]).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn log_inverts_exp() {
        let s = car(0.25, 4);
        let b = addit(&s, [0.3, -0.5]);
        let u = exp_unit(&s, &b, 4, ExpMethod::Product).unwrap();
        let l = log_addit(&s, &u).unwrap();
        assert!(norm(&sub(&l.cell, &b.cell)) < 1e-15);
        let y = log_unit(&s, &u, 4, 2).unwrap();
        assert!(norm(&sub(&y, &b.value(&s, 4).unwrap())) < 1e-14);
        assert!(y[0].norm() < 1e-15);
        assert!(exp_image_defect(&s, &u).unwrap() < 1e-14);
        let om = UnitFamily::vacuum(&s, 4);
        assert!(norm(&log_unit(&s, &om, 4, 1).unwrap()) == 0.0);
        assert!(log_unit(&s, &u, 3, 1).is_err());
    }

    #[test]
    fn unital_units_satisfy_the_structure_equation() {
        let s = car(0.25, 4);
        let b = addit(&s, [0.3, -0.5]);
        let (u, lambda) = unital_unit(&s, &b, 0.7, 4).unwrap();
        let d = decompose_unital(&s, &u).unwrap();
        assert!(d.norm_defect < 1e-12);
        assert!(d.structure_residual < 1e-9);
        assert!((d.lambda - lambda).norm() < 1e-12);
        assert!(u.unit_residual(&s).unwrap() < 1e-13);
    }

    #[test]
    fn general_integrands_need_linear_f() {
        let s = car(0.5, 3);
        let b = addit(&s, [0.3, 0.2]);
        let bp = AdaptedProcess::general((0..=3).map(|k| b.value(&s, k).unwrap()).collect());
        assert!(ito_integral(&s, &bp, &b, 0, 3).is_ok());
        // doubling the value at one time breaks the condition
        let mut bad = bp.clone();
        bad.values[2].iter_mut().for_each(|x| *x *= 2.0);
        assert!(ito_integral(&s, &bad, &b, 0, 3).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn ito_isometry_and_properties(seed in 0u64..10_000) {
            let km = 5;
            let s = car(0.5, km);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = addit(&s, [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let x = random_simple(&s, km, &mut rng);
            let y = random_simple(&s, km, &mut rng);
            let (j, k) = (rng.gen_range(0..=km), km);
            let ix = ito_integral(&s, &x, &b, j, k).unwrap();
            let iy = ito_integral(&s, &y, &b, j, k).unwrap();
            prop_assert!((inner(&ix, &iy) - isometry_rhs(&x, &y, &b, j, k)).norm() < 1e-10);
            // vacuum orthogonality
            prop_assert!(ix[0].norm() < 1e-10);
            // interval additivity at a split point
            let sp = rng.gen_range(j..=k);
            let left = ito_integral(&s, &x, &b, j, sp).unwrap();
            let lhs = s.product(sp, k - sp, &left, &s.vacuum(k - sp)).unwrap();
            let rhs = ito_integral(&s, &x, &b, sp, k).unwrap();
            let total: Vec<C64> = lhs.iter().zip(&rhs).map(|(a, c)| a + c).collect();
            prop_assert!(norm(&sub(&total, &ix)) < 1e-10);
            // orthogonal increments
            prop_assert!(inner(&rhs, &lhs).norm() < 1e-10);
            let st = rng.gen_range(0..=km);
            let r = property_residuals(&s, &x, &y, &b, st, km - st).unwrap();
            prop_assert!(r.max() < 1e-10, "{:?}", r);
        }
    }
}
