//! Hot-path benchmarks: master-equation right-hand side, RK4 stepping,
//! quasiprobability grids, and the per-sample spectral work.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qamp_bench::{model, state};
use qamp_core::hilbert::{build_field_state, FieldStateSpec};
use qamp_core::integrate::Rk4Stepper;
use qamp_core::liouville::Liouvillian;
use qamp_core::phasespace::{q_function, wigner_function, GridSpec};
use qamp_core::semiclassical::{paper_parameters, sc_numeric_steady_state};
use qamp_core::thermo::ThermoCtx;

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("liouvillian_apply");
    for n in [40usize, 56, 100] {
        let m = model(n);
        let l = Liouvillian::new(&m).unwrap();
        let rho = state(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(l.apply(black_box(rho.matrix()))));
        });
    }
    group.finish();
}

fn bench_rk4(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4_step");
    for n in [40usize, 56, 100] {
        let m = model(n);
        let l = Liouvillian::new(&m).unwrap();
        let rho = state(n);
        let mut stepper = Rk4Stepper::new(l, rho.matrix().view()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| stepper.step(black_box(0.01)));
        });
    }
    group.finish();
}

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("thermo_sample");
    for n in [56usize, 100] {
        let m = model(n);
        let ctx = ThermoCtx::new(&m).unwrap();
        let rho = state(n);
        let y = rho.matrix().as_slice().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(ctx.sample(black_box(y), 0.0).unwrap()));
        });
    }
    group.finish();
}

fn bench_grids(c: &mut Criterion) {
    let rho = build_field_state(&FieldStateSpec::PoissonMixed(4.0), 56)
        .unwrap()
        .rho;
    let spec = GridSpec::square(9.0, 201);
    c.bench_function("q_function_201", |b| {
        b.iter(|| black_box(q_function(black_box(&rho), spec).unwrap()));
    });
    c.bench_function("wigner_function_201", |b| {
        b.iter(|| black_box(wigner_function(black_box(&rho), spec).unwrap()));
    });
}

fn bench_semiclassical(c: &mut Criterion) {
    let m = paper_parameters();
    c.bench_function("sc_numeric_steady_state", |b| {
        b.iter(|| black_box(sc_numeric_steady_state(black_box(&m)).unwrap()));
    });
}

criterion_group!(
    benches,
    bench_rhs,
    bench_rk4,
    bench_sampling,
    bench_grids,
    bench_semiclassical
);
criterion_main!(benches);
