use fockflow_core::flows::{commutant_times_unit, fibers, intertwiner_space};
use fockflow_core::{FlowKind, FlowModel, SuperProductSystem, RANK_TOL};

use super::{cap, guard};
use crate::config::Config;
use crate::report::Record;

const INTERTWINER_PAIRS: [(usize, usize); 6] = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)];
const FIBER_PAIRS: [(usize, usize); 2] = [(1, 3), (2, 2)];

/// `E_k` equals the span of `x' Gamma(shift_k)` over the commutant.
pub fn intertwiners(cfg: &Config) -> Vec<Record> {
    let anchor = "intertwiners are the commutant times the canonical unit";
    let mut out = Vec::new();
    for (n, m) in cfg.pairs(&INTERTWINER_PAIRS) {
        for k in 1..=m {
            let id = format!("clifford n={n} m={m} k={k}: intertwiner angle");
            out.extend(guard(&id, anchor, || {
                let model = FlowModel::clifford(m, cfg.width, n)?;
                let (rows, cols) = (model.space(m).dim(), model.space(m - k).dim());
                cap(cfg, rows * cols)?;
                let e = intertwiner_space(&model, k, cfg.max_ops.max(rows * cols))?;
                let c = commutant_times_unit(&model, k)?;
                Ok(vec![
                    Record::exact(format!("clifford n={n} m={m} k={k}: intertwiner dim"), anchor, "oracle", e.dim(), c.dim()),
                    Record::residual(id.clone(), anchor, "oracle", e.space.distance(&c.space), cfg.angle_tol).with_gap(e.space.gap),
                ])
            }));
        }
    }
    out
}

/// `H_k Omega` is the even wedge space over the first `k` cells, of dimension
/// `2^{kn-1}`, for both Clifford kinds.
pub fn clifford(cfg: &Config) -> Vec<Record> {
    let anchor = "Clifford fibers are even wedge spaces";
    let mut out = Vec::new();
    for (n, m) in cfg.pairs(&FIBER_PAIRS) {
        let tag = format!("n={n} m={m}");
        out.extend(guard(&format!("clifford {tag}: fibers"), anchor, || {
            let mut recs = Vec::new();
            let mut systems = Vec::new();
            for kind in [FlowKind::Clifford, FlowKind::EvenClifford] {
                let model = FlowModel::new(kind, fockflow_core::Grid::new(m, cfg.width, n)?, 0)?;
                cap(cfg, model.space(m).dim())?;
                for k in 0..=m {
                    let rep = fibers(&model, k, cfg.max_ops)?;
                    let want = if k == 0 { 1 } else { 1usize << (k * n - 1) };
                    let name = kind.name();
                    recs.push(Record::exact(format!("{name} {tag} k={k}: fiber dim"), anchor, "closed-form", rep.h_dim, want));
                    let even = model.even_wedge_space(k)?;
                    recs.push(
                        Record::residual(format!("{name} {tag} k={k}: angle to even wedge space"), anchor, "closed-form", rep.frame.distance(&even), cfg.angle_tol)
                            .with_gap(rep.gap)
                            .with_leakage(rep.leakage),
                    );
                }
                systems.push(SuperProductSystem::from_flow(&model, m)?);
            }
            // both kinds embedded in the antisymmetric ambient
            let worst = (0..=m)
                .map(|k| Ok(systems[0].fiber(k)?.subspace().distance(&systems[1].fiber(k)?.subspace())))
                .collect::<fockflow_core::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            recs.push(Record::residual(format!("{tag}: Clifford and even Clifford fibers coincide"), anchor, "oracle", worst, cfg.angle_tol));
            Ok(recs)
        }));
    }
    out
}

/// The free fiber at one cell is the vacuum line, with a clear spectral gap.
pub fn free(cfg: &Config) -> Vec<Record> {
    let anchor = "free fibers are trivial";
    let id = "free d=2 L=4 k=1: fiber dim";
    guard(id, anchor, || {
        let model = FlowModel::free(2, cfg.width, 2, 4)?;
        let rep = fibers(&model, 1, cfg.max_ops)?;
        let bound = 10.0 * (RANK_TOL + rep.leakage);
        Ok(vec![
            Record::exact(id, anchor, "closed-form", rep.h_dim, 1).with_gap(rep.gap).with_leakage(rep.leakage),
            Record::residual("free d=2 L=4 k=1: vacuum residual", anchor, "closed-form", rep.frame.residual(&model.vacuum(2)), cfg.angle_tol),
            Record::at_least("free d=2 L=4 k=1: spectral gap", anchor, "plumbing", rep.gap, bound).with_leakage(rep.leakage),
        ])
    })
}
