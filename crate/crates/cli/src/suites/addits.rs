use fockflow_core::flows::relative_commutant;
use fockflow_core::sps::addit_space;
use fockflow_core::{AdditFamily, FlowKind, FlowModel, Grid, SuperProductSystem, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::guard;
use crate::config::{Config, ModelKind};
use crate::report::Record;

const FREE_LEN: usize = 3;

fn flow_kinds() -> [(ModelKind, FlowKind); 3] {
    [(ModelKind::Clifford, FlowKind::Clifford), (ModelKind::EvenClifford, FlowKind::EvenClifford), (ModelKind::Free, FlowKind::Free)]
}

fn flow_model(kind: FlowKind, m: usize, width: f64, n: usize) -> fockflow_core::Result<FlowModel> {
    FlowModel::new(kind, Grid::new(m, width, n)?, if kind == FlowKind::Free { FREE_LEN } else { 0 })
}

/// Centered-addit dimension of the CAR system equals `n`.
pub fn car_index(cfg: &Config) -> Vec<Record> {
    if !cfg.wants(ModelKind::Car) {
        return vec![];
    }
    let anchor = "index of the CAR system equals the internal dimension";
    let ranks: Vec<usize> = cfg.rank.map_or(vec![1, 2, 3], |n| vec![n]);
    ranks
        .into_iter()
        .flat_map(|n| {
            let id = format!("car n={n}: index");
            guard(&id, anchor, || {
                let sps = SuperProductSystem::car(n, cfg.width, 1)?;
                let a = addit_space(&sps, cfg.depth)?;
                Ok(vec![Record::exact(id.clone(), anchor, "closed-form", a.index(), n).with_gap(a.gap)])
            })
        })
        .collect()
}

/// Centered-addit dimension is zero for the flows and the trivial system.
pub fn flow_index(cfg: &Config) -> Vec<Record> {
    let anchor = "coupling index of the flows is zero";
    let mut out = Vec::new();
    for (mk, kind) in flow_kinds() {
        if !cfg.wants(mk) {
            continue;
        }
        for (n, m) in cfg.pairs(&[(1, 3), (2, 3)]) {
            let id = format!("{} n={n} m={m}: coupling index", kind.name());
            out.extend(guard(&id, anchor, || {
                let model = flow_model(kind, m, cfg.width, n)?;
                let sps = SuperProductSystem::from_flow(&model, 1)?;
                let a = addit_space(&sps, cfg.depth)?;
                Ok(vec![Record::exact(id.clone(), anchor, "closed-form", a.index(), 0).with_gap(a.gap)])
            }));
        }
    }
    if cfg.wants(ModelKind::Trivial) {
        let id = "trivial: index";
        out.extend(guard(id, anchor, || {
            let a = addit_space(&SuperProductSystem::trivial(cfg.width, 1)?, cfg.depth)?;
            Ok(vec![Record::exact(id, anchor, "closed-form", a.index(), 0).with_gap(a.gap)])
        }));
    }
    out
}

/// Relative commutants are even, increase with `k`, and no centered addit
/// exists: the gauge group is trivial.
pub fn gauge(cfg: &Config) -> Vec<Record> {
    let anchor = "gauge group of the flows is trivial";
    let mut out = Vec::new();
    for (mk, kind) in flow_kinds() {
        if !cfg.wants(mk) {
            continue;
        }
        let (n, m) = cfg.pairs(&[(2, 2)])[0];
        let tag = format!("{} n={n} m={m}", kind.name());
        out.extend(guard(&format!("{tag}: gauge group trivial"), anchor, || {
            let model = flow_model(kind, m, cfg.width, n)?;
            let mut worst_even: f64 = 0.0;
            let mut worst_nested: f64 = 0.0;
            let mut prev = None;
            for k in 0..=m {
                let rc = relative_commutant(&model, k)?;
                let v = &rc.vectors;
                let excess = if kind == FlowKind::Free {
                    // the vacuum line is the only even option
                    if v.dim() == 1 { v.residual(&model.vacuum(m)) } else { 1.0 }
                } else {
                    model.even_wedge_space(k)?.excess_sin(v)
                };
                worst_even = worst_even.max(excess);
                if let Some(p) = prev.replace(v.clone()) {
                    worst_nested = worst_nested.max(v.excess_sin(&p));
                }
            }
            let index = addit_space(&SuperProductSystem::from_flow(&model, 1)?, cfg.depth)?.index();
            let trivial = worst_even <= cfg.angle_tol && worst_nested <= cfg.angle_tol && index == 0;
            Ok(vec![
                Record::residual(format!("{tag}: relative commutants inside even part"), anchor, "closed-form", worst_even, cfg.angle_tol),
                Record::residual(format!("{tag}: relative commutants increase"), anchor, "closed-form", worst_nested, cfg.angle_tol),
                Record::exact(format!("{tag}: gauge group trivial"), anchor, "closed-form", trivial, true),
            ])
        }));
    }
    out
}

/// `index(S1 (x) S2) >= index(S1) + index(S2)`.
pub fn tensor(cfg: &Config) -> Vec<Record> {
    let anchor = "index is superadditive under tensor products";
    let cases: [(&str, usize, Option<usize>); 3] = [("car1 x car1", 1, Some(1)), ("car2 x car1", 2, Some(1)), ("car1 x trivial", 1, None)];
    cases
        .iter()
        .flat_map(|&(name, a, b)| {
            let id = format!("{name}: index");
            guard(&id, anchor, || {
                let s1 = SuperProductSystem::car(a, cfg.width, 1)?;
                let s2 = match b {
                    Some(n) => SuperProductSystem::car(n, cfg.width, 1)?,
                    None => SuperProductSystem::trivial(cfg.width, 1)?,
                };
                let t = SuperProductSystem::tensor(&s1, &s2)?;
                let i1 = addit_space(&s1, cfg.depth)?.index();
                let i2 = addit_space(&s2, cfg.depth)?.index();
                let it = addit_space(&t, cfg.depth)?;
                Ok(vec![Record::at_least(id.clone(), anchor, "closed-form", it.index() as f64, (i1 + i2) as f64).with_gap(it.gap)])
            })
        })
        .collect()
}

/// Cell-generated addits obey the addit law on random cell values.
pub fn law(cfg: &Config) -> Vec<Record> {
    let anchor = "addit law";
    let id = "car n=2: addit law residual";
    guard(id, anchor, || {
        let sps = SuperProductSystem::car(2, cfg.width, 4)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let mut cell: Vec<C64> = (0..4).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            cell[0] = C64::new(0.0, 0.0);
            let b = AdditFamily::new(&sps, cell)?;
            for j in 0..=2 {
                for k in 0..=2 {
                    worst = worst.max(b.law_residual(&sps, j, k)?);
                }
            }
        }
        Ok(vec![Record::residual(id, anchor, "exact", worst, cfg.residual_tol)])
    })
}
