use fockflow_core::fock::{inner, norm};
use fockflow_core::ito::{
    cell_addit, decompose_unital, exp_image_defect, exp_unit, log_unit, two_level_discrepancy, unital_unit, ExpMethod,
};
use fockflow_core::{AdditFamily, Grid, GridFn, SuperProductSystem, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::guard;
use crate::config::Config;
use crate::report::Record;

/// Cell widths of the convergence ladder, each compared with its half.
pub const LADDER: [f64; 3] = [0.5, 0.25, 0.125];
/// Value of the one-mode test function; `lambda = |v|^2`.
pub const VALUE: f64 = 0.5;
pub const HORIZON: f64 = 1.0;
const RATIO_TOL: f64 = 0.4;
const COVARIANCE_CELLS: usize = 5;

fn addit(sps: &SuperProductSystem, values: &[f64]) -> fockflow_core::Result<AdditFamily> {
    cell_addit(sps, &GridFn::from_real(Grid::new(1, sps.width(), values.len())?, values)?)
}

fn cells(width: f64) -> usize {
    (HORIZON / width).round() as usize
}

/// `<Exp(b)_k, Exp(c)_k> = (1 + width <f, g>)^k` for random cell functions,
/// and the Picard series equal to the product on the grid.
pub fn covariance(cfg: &Config) -> Vec<Record> {
    let anchor = "covariance of exponential units";
    guard("exp: covariance residual", anchor, || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        let mut picard: f64 = 0.0;
        for &w in &LADDER {
            let k = COVARIANCE_CELLS;
            let sps = SuperProductSystem::car(2, w, k)?;
            let f: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (b, c) = (addit(&sps, &f)?, addit(&sps, &g)?);
            let u = exp_unit(&sps, &b, k, ExpMethod::Product)?;
            let v = exp_unit(&sps, &c, k, ExpMethod::Product)?;
            let fg: f64 = f.iter().zip(&g).map(|(a, b)| a * b).sum();
            for j in 0..=k {
                let want = (1.0 + w * fg).powi(j as i32);
                worst = worst.max((inner(&u.values[j], &v.values[j]) - C64::new(want, 0.0)).norm());
            }
            let p = exp_unit(&sps, &b, k, ExpMethod::Picard(k))?;
            for j in 0..=k {
                let d: Vec<C64> = p.values[j].iter().zip(&u.values[j]).map(|(a, b)| a - b).collect();
                picard = picard.max(norm(&d));
            }
        }
        Ok(vec![
            Record::residual("exp: covariance residual", anchor, "closed-form", worst, cfg.residual_tol),
            Record::residual("exp: Picard minus product on the grid", anchor, "exact", picard, cfg.residual_tol),
        ])
    })
}

/// Closed form of `|R u^w - u^{w/2}|^2` for the product unit of a one-mode
/// addit with `lambda = |v|^2` at time `t`.
pub fn exp_discrepancy_closed_form(lambda: f64, w: f64, t: f64) -> f64 {
    (1.0 + lambda * w / 2.0).powf(2.0 * t / w) - (1.0 + lambda * w).powf(t / w)
}

/// Closed form of `|Log_w u - Log_{w/2} u|^2` at time `t` for the product
/// unit on the grid of width `fine`: `(t / w) (a - 1)^2` with
/// `a = (1 + lambda fine)^{w / (2 fine)}`.
pub fn log_discrepancy_closed_form(lambda: f64, w: f64, fine: f64, t: f64) -> f64 {
    let a = (1.0 + lambda * fine).powf(w / (2.0 * fine));
    t / w * (a - 1.0).powi(2)
}

/// Measured Exp discrepancies between neighbouring grids for the ladder.
pub fn exp_discrepancies() -> fockflow_core::Result<Vec<f64>> {
    LADDER
        .iter()
        .map(|&w| {
            let (k, coarse, fine) = (cells(w), SuperProductSystem::car(1, w, cells(w))?, SuperProductSystem::car(1, w / 2.0, 2 * cells(w))?);
            let u = exp_unit(&coarse, &addit(&coarse, &[VALUE])?, k, ExpMethod::Product)?;
            let v = exp_unit(&fine, &addit(&fine, &[VALUE])?, 2 * k, ExpMethod::Product)?;
            two_level_discrepancy(&coarse, k, &u.values[k], &v.values[2 * k], 1)
        })
        .collect()
}

/// Measured Log discrepancies between depths for the unit on the finest grid.
pub fn log_discrepancies() -> fockflow_core::Result<Vec<f64>> {
    let fine = LADDER[LADDER.len() - 1] / 2.0;
    let k = cells(fine);
    let sps = SuperProductSystem::car(1, fine, k)?;
    let u = exp_unit(&sps, &addit(&sps, &[VALUE])?, k, ExpMethod::Product)?;
    LADDER
        .iter()
        .map(|&w| {
            let depth = (HORIZON / w).log2().round() as u32;
            let a = log_unit(&sps, &u, k, depth)?;
            let b = log_unit(&sps, &u, k, depth + 1)?;
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum())
        })
        .collect()
}

fn ladder_records(name: &str, anchor: &str, measured: &[f64], oracle: impl Fn(f64) -> f64, tol: f64) -> Vec<Record> {
    let mut out = Vec::new();
    for (&w, &d) in LADDER.iter().zip(measured) {
        out.push(Record::close(format!("{name} width={w}: discrepancy"), anchor, "closed-form", d, oracle(w), tol));
    }
    for (i, pair) in measured.windows(2).enumerate() {
        out.push(Record::close(format!("{name} width={}: halving ratio", LADDER[i]), anchor, "closed-form", pair[0] / pair[1], 2.0, RATIO_TOL));
    }
    out
}

/// First-order convergence of Exp between neighbouring grids.
pub fn exp_ladder(cfg: &Config) -> Vec<Record> {
    let anchor = "Exp converges at first order in the cell width";
    let lambda = VALUE * VALUE;
    guard("exp ladder", anchor, || {
        let d = exp_discrepancies()?;
        Ok(ladder_records("exp", anchor, &d, |w| exp_discrepancy_closed_form(lambda, w, HORIZON), cfg.residual_tol))
    })
}

/// First-order convergence of the dyadic Log.
pub fn log_ladder(cfg: &Config) -> Vec<Record> {
    let anchor = "Log converges at first order in the cell width";
    let lambda = VALUE * VALUE;
    let fine = LADDER[LADDER.len() - 1] / 2.0;
    guard("log ladder", anchor, || {
        let d = log_discrepancies()?;
        let mut recs = ladder_records("log", anchor, &d, |w| log_discrepancy_closed_form(lambda, w, fine, HORIZON), cfg.residual_tol);
        let sps = SuperProductSystem::car(1, fine, cells(fine))?;
        let u = exp_unit(&sps, &addit(&sps, &[VALUE])?, cells(fine), ExpMethod::Product)?;
        recs.push(Record::residual("exp of log on the grid", anchor, "exact", exp_image_defect(&sps, &u)?, cfg.residual_tol));
        Ok(recs)
    })
}

/// `|b_1|^2 + lambda + conj(lambda) = 0` for constructed unital units.
pub fn structure(cfg: &Config) -> Vec<Record> {
    let anchor = "structure equation of unital units";
    guard("unital units: structure residual", anchor, || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 7);
        let mut worst: f64 = 0.0;
        let mut lambda_err: f64 = 0.0;
        let mut norm_err: f64 = 0.0;
        for &w in &LADDER {
            let sps = SuperProductSystem::car(2, w, 4)?;
            for _ in 0..4 {
                let b = addit(&sps, &[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])?;
                let theta = rng.gen_range(-2.0..2.0);
                let (u, lambda) = unital_unit(&sps, &b, theta, 4)?;
                let d = decompose_unital(&sps, &u)?;
                worst = worst.max(d.structure_residual);
                lambda_err = lambda_err.max((d.lambda - lambda).norm());
                norm_err = norm_err.max(d.norm_defect);
            }
        }
        Ok(vec![
            Record::residual("unital units: structure residual", anchor, "exact", worst, 1e-9),
            Record::residual("unital units: recovered lambda", anchor, "exact", lambda_err, 1e-9),
            Record::residual("unital units: norm defect", anchor, "exact", norm_err, 1e-9),
        ])
    })
}
