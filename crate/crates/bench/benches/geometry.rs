use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use solharm_core::hyperbolic::EigenConfig;
use solharm_core::liegroup::{christoffel_at, multiply};
use solharm_core::stochastic::{bm_step, sample_paths, PathConfig};
use solharm_core::verify::{fd_laplacian_sol, residual_grid};
use solharm_core::{GridSpec, GroupParam, HarmonicFunction, Point, RadialEigenfunction};

fn group(c: &mut Criterion) {
    let a = GroupParam::new(1.0).unwrap();
    let p = Point::new(0.3, -1.2, 0.8);
    let q = Point::new(-2.0, 0.5, -1.1);
    c.bench_function("multiply", |b| b.iter(|| multiply(black_box(p), black_box(q), a)));
    c.bench_function("christoffel_at", |b| b.iter(|| christoffel_at(black_box(p), a)));
    c.bench_function("bm_step", |b| b.iter(|| bm_step(black_box(p), 1e-3, [0.1, -0.4, 1.3], a)));
}

fn harmonic(c: &mut Criterion) {
    c.bench_function("eigenfunction_solve", |b| {
        b.iter(|| RadialEigenfunction::solve(black_box(EigenConfig::default())).unwrap())
    });
    let hf = HarmonicFunction::standard().unwrap();
    let p = Point::new(0.0, 0.7, -0.4);
    let a = GroupParam::new(0.5).unwrap();
    c.bench_function("lift_u", |b| b.iter(|| hf.lift_u(black_box(p)).unwrap()));
    c.bench_function("lift_u_derivatives", |b| b.iter(|| hf.lift_u_derivatives(black_box(p)).unwrap()));
    c.bench_function("fd_laplacian_sol", |b| {
        b.iter(|| fd_laplacian_sol(&|q| hf.lift_u(q), black_box(p), a, 1e-3).unwrap())
    });
    let grid = GridSpec::parse("-2:2:9,-2:2:9,-2:2:9").unwrap();
    c.bench_function("residual_grid_9", |b| b.iter(|| residual_grid(&hf, &grid, a, 1e-3).unwrap()));
}

fn paths(c: &mut Criterion) {
    let cfg = PathConfig::new(Point::ORIGIN, 1.0, 1e-3, 7, GroupParam::ZERO);
    c.bench_function("sample_paths_64x1000", |b| b.iter(|| sample_paths(black_box(&cfg), 64).unwrap()));
}

criterion_group!(benches, group, harmonic, paths);
criterion_main!(benches);
