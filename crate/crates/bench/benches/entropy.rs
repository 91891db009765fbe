use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use tentflex::density::{series_density, DEFAULT_TOL};
use tentflex::entropy::{metric_entropy, topological_entropy};
use tentflex::flex::{rect_root, solve_skew};
use tentflex::ulam::{build_matrix, stationary_density};
use tentflex::SkewTentMap;

fn densities(c: &mut Criterion) {
    let f = SkewTentMap::new(2.3, 1.7).unwrap();
    c.bench_function("series_density", |b| {
        b.iter(|| series_density(black_box(&f), DEFAULT_TOL).unwrap())
    });
    let rho = series_density(&f, DEFAULT_TOL).unwrap();
    c.bench_function("metric_entropy", |b| {
        b.iter(|| metric_entropy(black_box(&f), &rho).unwrap())
    });
}

fn kneading(c: &mut Criterion) {
    let tame = SkewTentMap::new(2.3, 1.7).unwrap();
    let skewed = SkewTentMap::new(112.558, 1.0088843).unwrap();
    c.bench_function("topological_entropy/tame", |b| {
        b.iter(|| topological_entropy(black_box(&tame)).unwrap())
    });
    c.bench_function("topological_entropy/skewed", |b| {
        b.iter(|| topological_entropy(black_box(&skewed)).unwrap())
    });
    let root = rect_root(&tame, None).unwrap();
    c.bench_function("topological_entropy/root", |b| {
        b.iter(|| topological_entropy(black_box(&root)).unwrap())
    });
}

fn ulam(c: &mut Criterion) {
    let f = SkewTentMap::new(2.3, 1.7).unwrap();
    let mut group = c.benchmark_group("ulam");
    group.sample_size(20);
    group.bench_function("build_4096", |b| {
        b.iter(|| build_matrix(black_box(&f), 4096).unwrap())
    });
    let mat = build_matrix(&f, 4096).unwrap();
    group.bench_function("stationary_4096", |b| {
        b.iter(|| stationary_density(black_box(&mat), 1e-10).unwrap())
    });
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_skew");
    group.sample_size(10);
    group.bench_function("0.6_0.3", |b| {
        b.iter(|| solve_skew(black_box(0.6), black_box(0.3)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, densities, kneading, ulam, solver);
criterion_main!(benches);
