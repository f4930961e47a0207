use fockflow_core::fock::inner;
use fockflow_core::ito::{cell_addit, isometry_rhs, ito_integral, property_residuals, AdaptedProcess};
use fockflow_core::{GridFn, Grid, SuperProductSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::guard;
use crate::config::Config;
use crate::report::Record;

const CELLS: usize = 5;
const RANK: usize = 2;

fn random_addit(sps: &SuperProductSystem, rng: &mut ChaCha8Rng) -> fockflow_core::Result<fockflow_core::AdditFamily> {
    let v: Vec<f64> = (0..RANK).map(|_| rng.gen_range(-1.5..1.5)).collect();
    cell_addit(sps, &GridFn::from_real(Grid::new(1, sps.width(), RANK)?, &v)?)
}

fn random_simple(sps: &SuperProductSystem, rng: &mut ChaCha8Rng) -> fockflow_core::Result<AdaptedProcess> {
    let mut bps = vec![0];
    bps.extend((1..CELLS).filter(|_| rng.gen_bool(0.4)));
    let frozen = bps.iter().map(|&s| sps.random_vector(s, rng)).collect::<fockflow_core::Result<_>>()?;
    AdaptedProcess::simple(sps, bps, frozen, CELLS)
}

/// Isometry and the five structural properties on random simple processes.
pub fn isometry_and_properties(cfg: &Config) -> Vec<Record> {
    let anchor = "Ito isometry and integral properties";
    guard("ito: isometry residual", anchor, || {
        let sps = SuperProductSystem::car(RANK, cfg.width, CELLS)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst = [0.0f64; 6];
        for _ in 0..cfg.samples {
            let b = random_addit(&sps, &mut rng)?;
            let x = random_simple(&sps, &mut rng)?;
            let y = random_simple(&sps, &mut rng)?;
            let j = rng.gen_range(0..=CELLS);
            let k = rng.gen_range(j..=CELLS);
            let ix = ito_integral(&sps, &x, &b, j, k)?;
            let iy = ito_integral(&sps, &y, &b, j, k)?;
            worst[0] = worst[0].max((inner(&ix, &iy) - isometry_rhs(&x, &y, &b, j, k)).norm());
            let s = rng.gen_range(0..=CELLS);
            let r = property_residuals(&sps, &x, &y, &b, s, CELLS - s)?;
            for (w, v) in worst[1..].iter_mut().zip([r.vacuum_orthogonal, r.additivity, r.module, r.increments, r.vacuum_integral]) {
                *w = w.max(v);
            }
        }
        let names = ["isometry", "vacuum orthogonality", "interval additivity", "module property", "orthogonal increments", "integral of the vacuum"];
        Ok(names
            .iter()
            .zip(worst)
            .map(|(name, w)| Record::residual(format!("ito {} samples: {name} residual", cfg.samples), anchor, "exact", w, cfg.residual_tol))
            .collect())
    })
}

/// General integrands: `F(t) = t` is accepted, a nonlinear rescaling is not.
pub fn general(cfg: &Config) -> Vec<Record> {
    let anchor = "general integrands with linear F";
    guard("ito: general integrands", anchor, || {
        let sps = SuperProductSystem::car(RANK, cfg.width, 3)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 1);
        let b = random_addit(&sps, &mut rng)?;
        let bp = AdaptedProcess::general((0..=3).map(|k| b.value(&sps, k)).collect::<fockflow_core::Result<_>>()?);
        let accepted = ito_integral(&sps, &bp, &b, 0, 3).is_ok();
        let mut bad = bp.clone();
        bad.values[2].iter_mut().for_each(|x| *x *= 2.0);
        let rejected = ito_integral(&sps, &bad, &b, 0, 3).is_err();
        Ok(vec![
            Record::exact("ito: linear integrand accepted", anchor, "plumbing", accepted, true),
            Record::exact("ito: nonlinear integrand rejected", anchor, "plumbing", rejected, true),
        ])
    })
}
