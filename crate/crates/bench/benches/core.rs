use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fockflow_bench::car_with_addit;
use fockflow_core::flows::{fibers, OP_BUDGET};
use fockflow_core::fock::create_mode;
use fockflow_core::freebasis::{s_to_l, FreeBasis, MatrixOracle};
use fockflow_core::ito::{exp_unit, ExpMethod};
use fockflow_core::sps::addit_space;
use fockflow_core::{FlowModel, FockSpace, SuperProductSystem};

fn anticommutators(c: &mut Criterion) {
    let mut g = c.benchmark_group("anticommutator");
    for d in [6usize, 8, 10] {
        let s = FockSpace::Antisymmetric { modes: d };
        let a = create_mode(s, 0).unwrap();
        let b = create_mode(s, d - 1).unwrap().adjoint();
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |bench, _| {
            bench.iter(|| black_box(a.mul(&b).add(&b.mul(&a))))
        });
    }
    g.finish();
}

fn clifford_fibers(c: &mut Criterion) {
    let model = FlowModel::clifford(2, 0.5, 2).unwrap();
    c.bench_function("clifford fiber n=2 m=2 k=1", |b| b.iter(|| fibers(black_box(&model), 1, OP_BUDGET).unwrap()));
}

fn addits(c: &mut Criterion) {
    let sps = SuperProductSystem::car(2, 1.0, 1).unwrap();
    c.bench_function("car n=2 addit space depth 2", |b| b.iter(|| addit_space(black_box(&sps), 2).unwrap()));
}

fn exp(c: &mut Criterion) {
    let (sps, b) = car_with_addit(2, 0.25, 4).unwrap();
    let mut g = c.benchmark_group("exp");
    g.bench_function("product", |bench| bench.iter(|| exp_unit(&sps, &b, 4, ExpMethod::Product).unwrap()));
    g.bench_function("picard", |bench| bench.iter(|| exp_unit(&sps, &b, 4, ExpMethod::Picard(4)).unwrap()));
    g.finish();
}

fn free_basis(c: &mut Criterion) {
    let word = [0usize, 0, 1, 1, 0, 0];
    let mut g = c.benchmark_group("free basis");
    g.bench_function("runs", |b| b.iter(|| s_to_l(black_box(&word)).unwrap()));
    let oracle = MatrixOracle::new(2, 6).unwrap();
    g.bench_function("matrix oracle", |b| b.iter(|| oracle.s_to_l(black_box(&word)).unwrap()));
    g.bench_function("inverse table", |b| b.iter(|| FreeBasis::new().l_to_s(black_box(&word)).unwrap()));
    g.finish();
}

criterion_group!(benches, anticommutators, clifford_fibers, addits, exp, free_basis);
criterion_main!(benches);
