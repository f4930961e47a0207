use fockflow_core::flows::{semiflow_table, SemiflowRow};
use fockflow_core::{FlowKind, FlowModel, Grid};

use super::guard;
use crate::config::Config;
use crate::report::Record;

const FREE_LEN: usize = 3;

fn table(kind: FlowKind, n: usize, m: usize, cfg: &Config) -> fockflow_core::Result<Vec<SemiflowRow>> {
    let model = FlowModel::new(kind, Grid::new(m, cfg.width, n)?, if kind == FlowKind::Free { FREE_LEN } else { 0 })?;
    super::cap(cfg, model.space(m).dim())?;
    semiflow_table(&model, m)
}

fn monotone(rows: &[SemiflowRow]) -> bool {
    rows.windows(2).all(|w| w[0].dim <= w[1].dim)
}

fn dims(rows: &[SemiflowRow]) -> String {
    rows.iter().map(|r| r.dim.to_string()).collect::<Vec<_>>().join(",")
}

/// Dimension and trace-moment tables of the relative commutants.
pub fn tables(cfg: &Config) -> Vec<Record> {
    let anchor = "tau-semiflow of relative commutants";
    let mut out = Vec::new();
    for (n, m) in cfg.pairs(&[(1, 3), (2, 2)]) {
        let tag = format!("n={n} m={m}");
        out.extend(guard(&format!("{tag}: semiflow tables"), anchor, || {
            let cl = table(FlowKind::Clifford, n, m, cfg)?;
            let ev = table(FlowKind::EvenClifford, n, m, cfg)?;
            let fr = table(FlowKind::Free, n, m, cfg)?;
            let moments = cl.iter().zip(&ev).map(|(a, b)| (a.m2 - b.m2).abs().max((a.m3 - b.m3).abs())).fold(0.0, f64::max);
            Ok(vec![
                Record::exact(format!("{tag}: clifford dims"), anchor, "oracle", dims(&cl), dims(&ev)),
                Record::residual(format!("{tag}: clifford vs even clifford moments"), anchor, "oracle", moments, cfg.angle_tol),
                Record::exact(format!("{tag}: dims nondecreasing"), anchor, "exact", monotone(&cl) && monotone(&ev), true),
                Record::exact(format!("{tag}: free dims"), anchor, "closed-form", dims(&fr), vec!["1"; m + 1].join(",")),
            ])
        }));
    }
    out
}
