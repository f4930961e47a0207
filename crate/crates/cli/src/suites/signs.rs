use fockflow_core::flows::{parity_sign, parity_sign_oracle};

use super::guard;
use crate::config::Config;
use crate::report::Record;

const MAX_MODES: usize = 6;

fn bits(mask: usize, d: usize) -> Vec<usize> {
    (0..d).filter(|b| mask >> b & 1 == 1).collect()
}

/// The closed-form sign against matrix conjugation for every admissible
/// triple `(I, F, F')` of index sets over `d` modes.
pub fn parity(_cfg: &Config) -> Vec<Record> {
    let anchor = "sign of conjugated Clifford words";
    (1..=MAX_MODES)
        .flat_map(|d| {
            let id = format!("d={d}: sign mismatches");
            guard(&id, anchor, || {
                let (mut total, mut bad) = (0usize, 0usize);
                for i in 0..1usize << d {
                    for f in (0..1usize << d).filter(|f| f & i == 0) {
                        for fp in (0..1usize << d).filter(|fp| fp & i == 0) {
                            let (iv, fv, fpv) = (bits(i, d), bits(f, d), bits(fp, d));
                            let s = parity_sign(&iv, &fv, &fpv)? as f64;
                            let o = parity_sign_oracle(d, &iv, &fv, &fpv)?;
                            total += 1;
                            bad += usize::from((s - o).abs() > 1e-12);
                        }
                    }
                }
                Ok(vec![Record::exact(format!("d={d}: sign mismatches over {total} triples"), anchor, "oracle", bad, 0)])
            })
        })
        .collect()
}
