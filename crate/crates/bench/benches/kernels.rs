use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grounded_bench::{platoon, random_directed};
use grounded_core::bounds::{self, Isoperimetric};
use grounded_core::platoon::{simulate, Disturbance, PlatoonConfig};
use grounded_core::{hinf, spectral};
use std::hint::black_box;

fn smallest_singular_value(c: &mut Criterion) {
    let mut group = c.benchmark_group("sigma1");
    for k in [10, 50, 200] {
        let l = random_directed(k, 1).grounded_laplacian().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &l.matrix, |b, m| {
            b.iter(|| spectral::smallest_singular_value(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn hinf_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("hinf");
    for k in [10, 50, 200] {
        let g = random_directed(k, 2);
        group.bench_with_input(BenchmarkId::new("dc_gain", k), &g, |b, g| b.iter(|| hinf::hinf_value(black_box(g)).unwrap()));
    }
    let g = random_directed(30, 3);
    let grid = hinf::default_grid();
    group.bench_function("sweep_30", |b| b.iter(|| hinf::hinf_verify_sweep(black_box(&g), &grid).unwrap()));
    group.finish();
}

fn bound_reports(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounds");
    let g = random_directed(12, 4);
    let u = g.undirected_counterpart().unwrap();
    group.bench_function("directed_12", |b| b.iter(|| bounds::directed_bounds(black_box(&g)).unwrap()));
    group.bench_function("undirected_brute_force_12", |b| {
        b.iter(|| bounds::undirected_bounds(black_box(&u), Isoperimetric::BruteForce).unwrap())
    });
    group.bench_function("certify_12", |b| b.iter(|| bounds::certify_gamma(black_box(&g), 1.0).unwrap()));
    group.finish();
}

fn platoon_sim(c: &mut Criterion) {
    let cfg = PlatoonConfig::new(platoon(15), 14.0)
        .with_disturbance(Disturbance::Constant { level: 0.1 })
        .with_horizon(10.0, 0.01);
    c.bench_function("simulate_15_followers_1000_steps", |b| b.iter(|| simulate(black_box(&cfg)).unwrap()));
}

criterion_group!(benches, smallest_singular_value, hinf_norm, bound_reports, platoon_sim);
criterion_main!(benches);
