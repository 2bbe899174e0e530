use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hkit::exec::{with_execution, Execution};
use hkit::harness::{heat_convergence_study, isomorphism_ratio_experiment, IsoConfig};
use hkit::spectral::{hoermander_norm, Axis, FrequencyGrid, SpectralField};
use hkit::symbol::{covering_sweep, petrovskii_check, ParabolicProblem};
use hkit::weights::{PhiLogPower, WeightParams};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_norm(c: &mut Criterion) {
    let grid = FrequencyGrid::new(vec![Axis::new(1.0, 40), Axis::new(2.0, 40), Axis::new(2.0, 40)], true).unwrap();
    let u = SpectralField::random(&grid, 1, |sq, k| (1.0 + sq + k.abs()).powf(-2.0));
    let w = WeightParams::new(2.75, 0.5, PhiLogPower::log_power(1.0));
    let mut group = c.benchmark_group("hoermander_norm");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_execution(mode, || hoermander_norm(black_box(&u), &w).unwrap()))
        });
    }
    group.finish();
}

fn bench_symbol(c: &mut Criterion) {
    let heat = ParabolicProblem::heat_dirichlet();
    let mut group = c.benchmark_group("symbol_checks");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new("petrovskii_128", name), |b| {
            b.iter(|| with_execution(mode, || petrovskii_check(&heat, 128, 1e-6).unwrap()))
        });
        group.bench_function(BenchmarkId::new("covering_64", name), |b| {
            b.iter(|| with_execution(mode, || covering_sweep(&heat, 64, 0.1).unwrap()))
        });
    }
    group.finish();
}

fn bench_harness(c: &mut Criterion) {
    let mut cfg = IsoConfig::heat(8, 3);
    cfg.levels = 1;
    let mut group = c.benchmark_group("harness");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new("ratio_ensemble", name), |b| {
            b.iter(|| with_execution(mode, || isomorphism_ratio_experiment(&cfg).unwrap()))
        });
        group.bench_function(BenchmarkId::new("strip_solver", name), |b| {
            b.iter(|| with_execution(mode, || heat_convergence_study(&[32], 0.5).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(kernels, bench_norm, bench_symbol, bench_harness);
criterion_main!(kernels);
