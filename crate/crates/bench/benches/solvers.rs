//! Criterion benchmarks for the solver and diagnostics hot paths.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qslab_core::analysis::{entropy_residual, weak_star_error, young_measure, EntropyPair};
use qslab_core::analysis::{TestDictionary, WindowGeometry};
use qslab_core::field::{CellField, GridSpec, Trajectory};
use qslab_core::flux::FluxModel;
use qslab_core::hyperbolic;
use qslab_core::quasistatic::BoundaryPath;
use qslab_core::viscous::stationary_profile_with_current;

fn relaxation_trajectory(n: usize, snapshots: usize) -> (FluxModel, Trajectory) {
    let f = FluxModel::traffic();
    let grid = GridSpec::new(n).unwrap();
    let u0 = CellField::constant(grid, 0.0, 0.5);
    let path = BoundaryPath::constants(0.3, 0.2).unwrap();
    let horizon = 0.5;
    let times: Vec<f64> = (0..=snapshots)
        .map(|k| horizon * k as f64 / snapshots as f64)
        .collect();
    let traj = hyperbolic::run(&f, &path, &u0, 0.1, 0.9, horizon, &times).unwrap();
    (f, traj)
}

fn bench_hyperbolic_run(c: &mut Criterion) {
    let f = FluxModel::traffic();
    let grid = GridSpec::new(400).unwrap();
    let u0 = CellField::constant(grid, 0.0, 0.5);
    let path = BoundaryPath::constants(0.3, 0.2).unwrap();
    c.bench_function("hyperbolic_run_n400_t0.1", |b| {
        b.iter(|| {
            hyperbolic::run(
                black_box(&f),
                &path,
                &u0,
                0.1,
                0.9,
                0.1,
                &[0.0, 0.05, 0.1],
            )
            .unwrap()
        })
    });
}

fn bench_stationary_profile(c: &mut Criterion) {
    let f = FluxModel::traffic();
    let grid = GridSpec::new(800).unwrap();
    c.bench_function("stationary_profile_n800", |b| {
        b.iter(|| stationary_profile_with_current(black_box(&f), 0.3, 0.7, 0.05, grid).unwrap())
    });
}

fn bench_entropy_residual(c: &mut Criterion) {
    let (f, traj) = relaxation_trajectory(400, 200);
    let pair = EntropyPair::kruzhkov(&f, 0.45).unwrap();
    c.bench_function("entropy_residual_n400_m201", |b| {
        b.iter(|| entropy_residual(black_box(&traj), &pair, 0.1).unwrap())
    });
}

fn bench_young_measure(c: &mut Criterion) {
    let (f, traj) = relaxation_trajectory(400, 200);
    let window = WindowGeometry::new(0.25, 0.5, 0.0, 1.0).unwrap();
    c.bench_function("young_measure_n400", |b| {
        b.iter(|| young_measure(black_box(&[&traj]), window, None, &f).unwrap())
    });
}

fn bench_weak_star(c: &mut Criterion) {
    let (_, traj) = relaxation_trajectory(400, 200);
    let dict = TestDictionary::v1(0.25, 0.5).unwrap();
    c.bench_function("weak_star_error_n400", |b| {
        b.iter(|| weak_star_error(black_box(&traj), |_, _| 0.3, &dict, 0.25, 0.5).unwrap())
    });
}

criterion_group!(
    benches,
    bench_hyperbolic_run,
    bench_stationary_profile,
    bench_entropy_residual,
    bench_young_measure,
    bench_weak_star
);
criterion_main!(benches);
