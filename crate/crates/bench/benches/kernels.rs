//! Micro-benchmarks for the hot kernels: plain and interval disc bounds,
//! the scaling optimizer, and the dense eigensolver they stand in for.
//!
//! Run with `cargo bench -p eigloc-bench`. The interesting readout is the
//! growth of each curve with `n`: the bound evaluations scale like the
//! number of matrix entries, the eigensolver like a dense factorization.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use eigloc::{
    eigenvalues_fast, gershgorin_bounds, interval_bounds, optimize_scaling_with, BoundTarget,
    BoundVariant, IntervalMatrix, OptimizeObjective, OptimizerBudget, RealMatrix, Rng,
};

/// Seeded random interval model: entries in [-1, 1], diagonal drift up to
/// 0.1, off-diagonal magnitudes up to 0.05 — same family the CLI `bench`
/// subcommand uses.
fn model(seed: u64, n: usize) -> IntervalMatrix {
    let mut rng = Rng::new(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let data: Vec<f64> = (0..n * n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let nominal = RealMatrix::from_flat(n, data).expect("square by construction");
    let lo: Vec<f64> = (0..n).map(|_| -rng.uniform(0.0, 0.1)).collect();
    let hi: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 0.1)).collect();
    let mut mag = RealMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                mag.set(i, j, rng.uniform(0.0, 0.05));
            }
        }
    }
    IntervalMatrix::new(nominal, lo, hi, mag).expect("valid model by construction")
}

fn bench_bounds_vs_eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounds_vs_eigensolver");
    group.sample_size(10);
    for n in [50, 100, 200] {
        let m = model(42, n);
        group.bench_with_input(BenchmarkId::new("gershgorin", n), &m, |b, m| {
            b.iter(|| black_box(gershgorin_bounds(black_box(m.nominal()), None)))
        });
        group.bench_with_input(BenchmarkId::new("interval_gershgorin", n), &m, |b, m| {
            b.iter(|| black_box(interval_bounds(black_box(m), None, false)))
        });
        group.bench_with_input(BenchmarkId::new("oracle_eig", n), &m, |b, m| {
            b.iter(|| black_box(eigenvalues_fast(black_box(m.nominal())).expect("converges")))
        });
    }
    group.finish();
}

fn bench_optimizer(c: &mut Criterion) {
    let mut group = c.benchmark_group("scaling_optimizer");
    group.sample_size(10);
    let budget = OptimizerBudget::default();
    for n in [5, 10, 20] {
        let m = model(7, n);
        group.bench_with_input(BenchmarkId::new("scaled_alpha", n), &m, |b, m| {
            b.iter(|| {
                black_box(optimize_scaling_with(
                    BoundTarget::Interval(black_box(m)),
                    BoundVariant::ScaledAlpha,
                    OptimizeObjective::MaxBound,
                    &budget,
                ))
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_bounds_vs_eigensolver, bench_optimizer);
criterion_main!(benches);
