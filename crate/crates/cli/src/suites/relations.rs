use fockflow_core::fock::create_mode;
use fockflow_core::{FockSpace, SparseOp, C64};

use super::{cap, guard};
use crate::config::Config;
use crate::report::Record;

const MAX_MODES: usize = 10;

/// `{a_p, a_q*} = delta_pq` and `{a_p, a_q} = 0` for every pair of modes.
pub fn antisymmetric(cfg: &Config) -> Vec<Record> {
    let anchor = "canonical anticommutation relations";
    (1..=MAX_MODES)
        .flat_map(|d| {
            guard(&format!("antisymmetric d={d}: anticommutator residual"), anchor, || {
                let s = FockSpace::Antisymmetric { modes: d };
                cap(cfg, s.dim())?;
                let id = SparseOp::identity(s.dim());
                let zero = SparseOp::zero(s.dim(), s.dim());
                let cr: Vec<SparseOp> = (0..d).map(|p| create_mode(s, p)).collect::<Result<_, _>>()?;
                let an: Vec<SparseOp> = cr.iter().map(|c| c.adjoint()).collect();
                let mut worst: f64 = 0.0;
                for p in 0..d {
                    for q in 0..d {
                        let mixed = an[p].mul(&cr[q]).add(&cr[q].mul(&an[p]));
                        worst = worst.max(mixed.distance(if p == q { &id } else { &zero }));
                        let pure = an[p].mul(&an[q]).add(&an[q].mul(&an[p]));
                        worst = worst.max(pure.frobenius());
                    }
                }
                Ok(vec![Record::residual(format!("antisymmetric d={d}: anticommutator residual"), anchor, "exact", worst, cfg.relation_tol)])
            })
        })
        .collect()
}

/// `l_p* l_q = delta_pq` on words shorter than the truncation length, where
/// the compression is exact.
pub fn full(cfg: &Config) -> Vec<Record> {
    let anchor = "Cuntz relations of the free creation operators";
    let mut out = Vec::new();
    for d in 1..=3 {
        for len in 1..=5 {
            let id = format!("full d={d} L={len}: compressed relation residual");
            out.extend(guard(&id, anchor, || {
                let s = FockSpace::Full { letters: d, max_len: len };
                cap(cfg, s.dim())?;
                let inner: Vec<usize> = (0..s.dim()).filter(|&i| s.particles(i) < len).collect();
                let cr: Vec<SparseOp> = (0..d).map(|p| create_mode(s, p)).collect::<Result<_, _>>()?;
                let one = SparseOp::identity(inner.len());
                let mut worst: f64 = 0.0;
                let mut leak: f64 = 0.0;
                for p in 0..d {
                    for q in 0..d {
                        let m = cr[p].adjoint().mul(&cr[q]).select(&inner, &inner);
                        let want = if p == q { one.clone() } else { SparseOp::zero(inner.len(), inner.len()) };
                        worst = worst.max(m.distance(&want));
                    }
                    // norm lost by l_p on the top layer, outside the compression
                    let n_top = (0..s.dim()).filter(|&i| s.particles(i) == len).count() as f64;
                    let top: Vec<C64> = (0..s.dim())
                        .map(|i| C64::new(if s.particles(i) == len { 1.0 / n_top.sqrt() } else { 0.0 }, 0.0))
                        .collect();
                    leak = leak.max(cr[p].leakage(&top));
                }
                Ok(vec![Record::residual(id.clone(), anchor, "exact", worst, cfg.relation_tol).with_leakage(leak)])
            }));
        }
    }
    out
}
