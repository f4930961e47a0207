//! Values computed independently of the library (closed forms evaluated by
//! hand or in a separate script) and frozen here.

use std::collections::BTreeMap;

use fockflow_core::flows::{fibers, parity_sign, OP_BUDGET};
use fockflow_core::fock::{inner, norm};
use fockflow_core::freebasis::{all_words, printed_recursion_mismatches, s_to_l, FreeBasis};
use fockflow_core::ito::{cell_addit, exp_unit, log_unit, two_level_discrepancy, ExpMethod};
use fockflow_core::sps::addit_space;
use fockflow_core::{FlowModel, Grid, GridFn, SuperProductSystem};

fn one_mode(sps: &SuperProductSystem, v: f64) -> fockflow_core::AdditFamily {
    cell_addit(sps, &GridFn::from_real(Grid::new(1, sps.width(), 1).unwrap(), &[v]).unwrap()).unwrap()
}

#[test]
fn exp_discrepancies_match_frozen_closed_form() {
    // (1 + lw/2)^(2/w) - (1 + lw)^(1/w) with l = 0.25, t = 1
    let frozen = [(0.5, 0.0088043212890625), (0.25, 0.004691865528911876), (0.125, 0.002424586300530329)];
    for (w, want) in frozen {
        let k = (1.0 / w) as usize;
        let coarse = SuperProductSystem::car(1, w, k).unwrap();
        let fine = SuperProductSystem::car(1, w / 2.0, 2 * k).unwrap();
        let u = exp_unit(&coarse, &one_mode(&coarse, 0.5), k, ExpMethod::Product).unwrap();
        let v = exp_unit(&fine, &one_mode(&fine, 0.5), 2 * k, ExpMethod::Product).unwrap();
        let d = two_level_discrepancy(&coarse, k, &u.values[k], &v.values[2 * k], 1).unwrap();
        assert!((d - want).abs() < 1e-13, "{w}: {d}");
    }
}

#[test]
fn log_discrepancies_match_frozen_closed_form() {
    // (1/w) ((1 + l/16)^(8w) - 1)^2 with l = 0.25 on the grid of width 1/16
    let frozen = [(1, 0.008186922295870147), (2, 0.0039675235748291016), (3, 0.001953125)];
    let sps = SuperProductSystem::car(1, 0.0625, 16).unwrap();
    let u = exp_unit(&sps, &one_mode(&sps, 0.5), 16, ExpMethod::Product).unwrap();
    for (depth, want) in frozen {
        let a = log_unit(&sps, &u, 16, depth).unwrap();
        let b = log_unit(&sps, &u, 16, depth + 1).unwrap();
        let d: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum();
        assert!((d - want).abs() < 1e-13, "{depth}: {d}");
    }
}

#[test]
fn exp_norms_are_powers() {
    // |Exp(b)_k|^2 = (1 + |v|^2 w)^k; here 1.0625^4
    let sps = SuperProductSystem::car(1, 0.25, 4).unwrap();
    let u = exp_unit(&sps, &one_mode(&sps, 0.5), 4, ExpMethod::Picard(4)).unwrap();
    assert!((inner(&u.values[4], &u.values[4]).re - 1.274_429_321_289_062_5).abs() < 1e-14);
    assert!((norm(&u.values[1]) - 1.0625f64.sqrt()).abs() < 1e-15);
}

#[test]
fn free_basis_frozen_counts() {
    assert_eq!(all_words(3, 6).len(), 1093);
    // x(0)^4 Omega = l(0000) + 3 l(00) + 2 l()
    let want: BTreeMap<Vec<usize>, i64> = [(vec![0, 0, 0, 0], 1), (vec![0, 0], 3), (vec![], 2)].into_iter().collect();
    assert_eq!(s_to_l(&[0, 0, 0, 0]).unwrap(), want);
    // l(0000) = x^4 - 3 x^2 + 1, the Chebyshev polynomial U_4(x/2)
    let inv: BTreeMap<Vec<usize>, i64> = [(vec![0, 0, 0, 0], 1), (vec![0, 0], -3), (vec![], 1)].into_iter().collect();
    assert_eq!(FreeBasis::new().l_to_s(&[0, 0, 0, 0]).unwrap(), inv);
    assert_eq!(printed_recursion_mismatches(8).len(), 36);
}

#[test]
fn frozen_dimensions_and_indices() {
    let m = FlowModel::clifford(2, 0.5, 2).unwrap();
    assert_eq!(fibers(&m, 2, OP_BUDGET).unwrap().h_dim, 8);
    let s = SuperProductSystem::car(3, 1.0, 1).unwrap();
    assert_eq!(addit_space(&s, 2).unwrap().index(), 3);
    assert_eq!(parity_sign(&[0, 1, 2], &[3], &[3, 4]).unwrap(), -1);
    assert_eq!(parity_sign(&[0], &[3], &[4]).unwrap(), 1);
    assert_eq!(parity_sign(&[0], &[], &[4]).unwrap(), -1);
}
