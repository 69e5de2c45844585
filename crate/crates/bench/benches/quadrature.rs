use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use littlewood::kernels::{flat_top_discrete_l1, FlatTopKernel};
use littlewood::modulus::good_modulus;
use littlewood::quadrature::{certified_l1, riemann_l1};
use littlewood::structures::{build_strong_lattice, Shape};
use littlewood::{indicator_poly, GridBudget, IntegerSet};

fn interval_norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("certified_l1_interval");
    for n in [101i64, 1001, 10_001] {
        let f = indicator_poly(&IntegerSet::interval(1, n)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| certified_l1(black_box(f), 0.05, GridBudget::default()).unwrap())
        });
    }
    g.finish();
}

fn box_norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("riemann_l1_box");
    g.sample_size(10);
    for n in [8usize, 16, 32] {
        let (set, _) = build_strong_lattice(&[n, n], Shape::Box, 0).unwrap();
        let f = indicator_poly(&set).unwrap();
        let grid = [64 * n, 64 * n];
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| riemann_l1(black_box(f), &grid, GridBudget::default()).unwrap())
        });
    }
    g.finish();
}

fn kernels(c: &mut Criterion) {
    c.bench_function("flat_top_build_20_40", |b| {
        b.iter(|| FlatTopKernel::build(black_box(20), black_box(40)).unwrap())
    });
    let k = FlatTopKernel::build(8, 40).unwrap();
    let r = 16 * k.min_period() as usize;
    c.bench_function("flat_top_discrete_l1_8_40", |b| {
        b.iter(|| flat_top_discrete_l1(black_box(&k), r).unwrap())
    });
}

fn ladder(c: &mut Criterion) {
    let set = IntegerSet::from_iter_dedup((0..10_000i64).map(|i| i * i % 1_000_003));
    c.bench_function("good_modulus_10k", |b| b.iter(|| good_modulus(black_box(&set)).unwrap()));
}

criterion_group!(benches, interval_norms, box_norms, kernels, ladder);
criterion_main!(benches);
