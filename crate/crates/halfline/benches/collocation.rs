//! Sequential vs parallel comparison for the data-parallel kernel — the
//! forward-difference Jacobian, one residual evaluation per column — plus
//! end-to-end solves on each side of the dispatch threshold.
//!
//! Build with default features for the rayon path; rerun with
//! `--no-default-features` to bench the sequential fallback end to end.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use halfline::solver::{fd_jacobian_sequential, NewtonConfig};
use halfline::volterra::{hfc_assemble, hfc_solve, rcc_solve, ModelParams};

#[cfg(feature = "parallel")]
use halfline::solver::fd_jacobian_parallel;

fn jacobian_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("fd_jacobian");
    for &n in &[20usize, 40, 80, 160] {
        let params = ModelParams::new(0.1, 0.1).unwrap();
        let system = hfc_assemble(&params, n, 0.5, 1.0).unwrap();
        let mut point = vec![0.0; n + 2];
        point[n + 1] = -0.0125;
        let f = |u: &[f64]| system.residual(u);
        let f0 = f(&point);
        let scale = f64::EPSILON.sqrt();

        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| black_box(fd_jacobian_sequential(&f, &point, &f0, scale)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| black_box(fd_jacobian_parallel(&f, &point, &f0, scale)))
        });
    }
    group.finish();
}

fn full_solves(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    let cfg = NewtonConfig::default();
    let params = ModelParams::new(0.1, 0.1).unwrap();

    // Benchmark-table sizes: below the parallel dispatch threshold, so these
    // run the sequential Jacobian under either feature set.
    group.bench_function("rcc_n14", |b| {
        b.iter(|| black_box(rcc_solve(&params, 14, 0.846979, &cfg).unwrap()))
    });
    group.bench_function("hfc_n20", |b| {
        b.iter(|| black_box(hfc_solve(&params, 20, 0.669751, 1.0, &cfg).unwrap()))
    });

    // Curve-accurate size: 102 Jacobian columns, parallel when the feature
    // is enabled.
    group.bench_function("hfc_n100", |b| {
        b.iter(|| black_box(hfc_solve(&params, 100, 0.668, 1.0, &cfg).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, jacobian_assembly, full_solves);
criterion_main!(benches);
