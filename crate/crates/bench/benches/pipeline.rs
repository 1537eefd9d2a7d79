use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fhl_bench::{koch_grid, unit_square};
use fhl_core::geometry::{gkf_system, rasterize, snowflake};
use fhl_core::heat::{fd_heat_solve, mc_heat_content, McOptions};
use fhl_core::mellin::{truncated_mellin, SampledFunction};
use fhl_core::series::log_grid;
use fhl_core::tube::distance_transform;
use fhl_core::zeta::{
    argument_principle_count, classify_lattice, complex_dimensions, moran_dimension, RatioProfile, Window,
    DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL,
};
use fhl_core::Complex64;

fn zeta(c: &mut Criterion) {
    let koch = RatioProfile::new(vec![(1.0 / 3.0, 4)]).unwrap();
    let nonlattice = RatioProfile::new(vec![(0.5, 1), (0.3, 2)]).unwrap();
    c.bench_function("moran_dimension", |b| b.iter(|| moran_dimension(black_box(&koch))));
    let class = classify_lattice(&koch, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOL);
    let w = Window::new(0.0, 2.0, 20.0).unwrap();
    c.bench_function("lattice_poles_T20", |b| b.iter(|| complex_dimensions(&koch, w, &class).unwrap()));
    let w = Window::new(-1.0, 2.0, 30.0).unwrap();
    c.bench_function("argument_principle_T30", |b| b.iter(|| argument_principle_count(&nonlattice, w).unwrap()));
}

fn mellin(c: &mut Criterion) {
    let t = log_grid(1e-6, 1.0, 64);
    let v: Vec<f64> = t.iter().map(|t| t.powf(-0.63) * (1.0 + 0.02 * (5.72 * t.ln()).cos())).collect();
    let f = SampledFunction::new(t, v, 0.63).unwrap();
    c.bench_function("truncated_mellin_sampled", |b| {
        b.iter(|| truncated_mellin(&f, 0.0, 0.5, black_box(Complex64::new(1.2, 5.0))).unwrap())
    });
}

fn geometry(c: &mut Criterion) {
    let sys = gkf_system(3, 1.0 / 3.0).unwrap();
    c.bench_function("snowflake_depth5", |b| b.iter(|| snowflake(&sys, 5).unwrap()));
    let flake = snowflake(&sys, 4).unwrap();
    c.bench_function("rasterize_koch_512", |b| b.iter(|| rasterize(&flake.boundary, 512).unwrap()));
    let g = koch_grid(4, 256);
    c.bench_function("distance_transform_koch_256", |b| b.iter(|| distance_transform(&g)));
}

fn heat(c: &mut Criterion) {
    let mut group = c.benchmark_group("heat");
    group.sample_size(10);
    let g = rasterize(&unit_square(), 128).unwrap();
    let ts = log_grid(1e-4, 1e-2, 16);
    group.bench_function("fd_square_128", |b| b.iter(|| fd_heat_solve(&g, 1.0, &ts).unwrap()));
    let sq = unit_square();
    group.bench_function("mc_square_10k", |b| {
        b.iter(|| mc_heat_content(&sq, 1.0, 1e-2, 10_000, 1e-4, McOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, zeta, mellin, geometry, heat);
criterion_main!(benches);
