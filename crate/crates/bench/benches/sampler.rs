use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hawkes_bench::fixtures;
use hawkes_core::{
    complexity_x, generate_cluster, optimize_eta, solve_psi_b, EffectiveClusterParams,
    PerfectSampler, RandomStream,
};

fn tilt(c: &mut Criterion) {
    let mut group = c.benchmark_group("tilt");
    for (name, model, eta) in fixtures() {
        group.bench_with_input(BenchmarkId::new("solve_psi_b", name), &eta[0], |b, &e| {
            b.iter(|| solve_psi_b(&model, black_box(e)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("complexity_x", name), &eta, |b, e| {
            b.iter(|| complexity_x(&model, black_box(e)).unwrap())
        });
    }
    group.finish();
}

fn optimizer(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize_eta");
    group.sample_size(10);
    for (name, model, _) in fixtures() {
        group.bench_function(name, |b| b.iter(|| optimize_eta(&model, 1e-6).unwrap()));
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampling");
    for (name, model, eta) in fixtures() {
        let eff = EffectiveClusterParams::untilted(&model).unwrap();
        let mut rng = RandomStream::new(1);
        group.bench_function(BenchmarkId::new("untilted_cluster", name), |b| {
            b.iter(|| generate_cluster(&eff, 0, 0.0, &mut rng).unwrap())
        });
        let sampler = PerfectSampler::new(&model, &eta).unwrap();
        let mut rng = RandomStream::new(2);
        group.bench_function(BenchmarkId::new("stationary_path_T1", name), |b| {
            b.iter(|| sampler.sample_path(1.0, &mut rng).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, tilt, optimizer, sampling);
criterion_main!(benches);
