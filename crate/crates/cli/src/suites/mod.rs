//! Verification suites. Each suite is a list of independent checks; checks
//! run on the rayon pool and their records are concatenated in list order.

use clap::ValueEnum;
use rayon::prelude::*;

use crate::config::Config;
use crate::report::{Record, Report};

mod addits;
mod explog;
mod fibers;
mod freebasis;
mod ito;
mod relations;
mod semiflow;
mod signs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    CarRelations,
    Ito,
    Explog,
    Addits,
    Fibers,
    Signs,
    Freebasis,
    Semiflow,
    Indices,
    All,
}

impl Suite {
    pub fn name(self) -> String {
        self.to_possible_value().unwrap().get_name().to_string()
    }
}

/// One unit of work. `criterion` numbers the acceptance criterion the check
/// belongs to; 0 marks supporting checks.
#[derive(Clone, Copy)]
pub struct Check {
    pub id: &'static str,
    pub criterion: u8,
    pub run: fn(&Config) -> Vec<Record>,
}

const fn check(id: &'static str, criterion: u8, run: fn(&Config) -> Vec<Record>) -> Check {
    Check { id, criterion, run }
}

pub fn checks(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::CarRelations => vec![check("antisymmetric-relations", 1, relations::antisymmetric), check("full-relations", 1, relations::full)],
        Suite::Fibers => vec![
            check("intertwiners", 2, fibers::intertwiners),
            check("clifford-fibers", 3, fibers::clifford),
            check("free-fiber", 4, fibers::free),
        ],
        Suite::Indices => vec![
            check("car-index", 5, addits::car_index),
            check("flow-index", 5, addits::flow_index),
            check("gauge", 5, addits::gauge),
        ],
        Suite::Addits => vec![
            check("car-index", 5, addits::car_index),
            check("flow-index", 5, addits::flow_index),
            check("tensor-index", 10, addits::tensor),
            check("addit-law", 0, addits::law),
        ],
        Suite::Ito => vec![check("ito", 6, ito::isometry_and_properties), check("general-integrands", 0, ito::general)],
        Suite::Explog => vec![
            check("exp-covariance", 7, explog::covariance),
            check("exp-ladder", 7, explog::exp_ladder),
            check("log-ladder", 7, explog::log_ladder),
            check("structure-equation", 7, explog::structure),
        ],
        Suite::Freebasis => vec![
            check("freebasis-routes", 8, freebasis::routes),
            check("freebasis-examples", 8, freebasis::examples),
            check("freebasis-recursions", 0, freebasis::recursions),
            check("cutoff", 0, freebasis::cutoff),
        ],
        Suite::Signs => vec![check("parity-signs", 9, signs::parity)],
        Suite::Semiflow => vec![check("semiflow", 11, semiflow::tables)],
        Suite::All => {
            let mut out: Vec<Check> = Vec::new();
            for s in Suite::value_variants().iter().filter(|s| **s != Suite::All) {
                for c in checks(*s) {
                    if !out.iter().any(|o| o.id == c.id) {
                        out.push(c);
                    }
                }
            }
            out
        }
    }
}

pub fn run_checks(list: &[Check], cfg: &Config) -> Vec<Record> {
    let parts: Vec<Vec<Record>> = list.par_iter().map(|c| (c.run)(cfg)).collect();
    parts.into_iter().flatten().collect()
}

pub fn run(suite: Suite, cfg: &Config) -> Report {
    Report::new(&suite.name(), cfg, run_checks(&checks(suite), cfg))
}

/// Records of every check belonging to one acceptance criterion.
pub fn criterion(n: u8, cfg: &Config) -> Vec<Record> {
    let list: Vec<Check> = checks(Suite::All).into_iter().filter(|c| c.criterion == n).collect();
    run_checks(&list, cfg)
}

/// Turns an error into a failing record so the suite continues.
pub(crate) fn guard(id: &str, anchor: &str, f: impl FnOnce() -> fockflow_core::Result<Vec<Record>>) -> Vec<Record> {
    f().unwrap_or_else(|e| vec![Record::failed(id, anchor, e)])
}

pub(crate) fn cap(cfg: &Config, dim: usize) -> fockflow_core::Result<()> {
    if dim > cfg.max_dim {
        return Err(fockflow_core::Error::Budget(format!("ambient dimension {dim} exceeds max_dim {}", cfg.max_dim)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_contains_each_check_once() {
        let all = checks(Suite::All);
        for (i, c) in all.iter().enumerate() {
            assert!(all.iter().skip(i + 1).all(|o| o.id != c.id));
        }
        for n in 1..=11 {
            assert!(all.iter().any(|c| c.criterion == n), "criterion {n}");
        }
        assert_eq!(Suite::CarRelations.name(), "car-relations");
    }
}
