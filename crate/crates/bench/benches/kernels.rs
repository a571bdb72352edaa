use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qpg_bench::raw_fixture;
use qpg_core::analysis::{empirical_fim, StateSampler};
use qpg_core::ansatz::Circuit;
use qpg_core::decode::{extracted_information, globality};
use qpg_core::rng;
use qpg_core::{ParamSet, Policy, PostProcessing, Statevector};

fn gates(c: &mut Criterion) {
    let mut group = c.benchmark_group("gates");
    for n in [4usize, 10, 16] {
        let mut psi = Statevector::zero_state(n).unwrap();
        group.bench_with_input(BenchmarkId::new("ry", n), &n, |b, &n| {
            b.iter(|| psi.apply_ry(n / 2, black_box(0.3)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("cz", n), &n, |b, &n| {
            b.iter(|| psi.apply_cz(0, n - 1).unwrap())
        });
    }
    group.finish();
}

fn prepare(c: &mut Criterion) {
    let mut group = c.benchmark_group("prepare");
    for (n, d) in [(4usize, 1usize), (6, 2), (8, 3)] {
        let (policy, params, x) = raw_fixture(n, d, 2, 1);
        let model = *policy.model();
        let circuit = Circuit::build(&model).unwrap();
        let params = ParamSet::from_flat(&model, &params).unwrap();
        group.bench_function(format!("n{n}_d{d}"), |b| b.iter(|| circuit.prepare(&params, black_box(&x)).unwrap()));
    }
    group.finish();
}

fn decoding(c: &mut Criterion) {
    let mut group = c.benchmark_group("globality");
    for n in [6usize, 8, 10] {
        let f = PostProcessing::global_recursive(n, 2).unwrap();
        group.bench_with_input(BenchmarkId::new("dp", n), &f, |b, f| b.iter(|| globality(f).unwrap()));
    }
    let f = PostProcessing::global_recursive(8, 2).unwrap();
    group.bench_function("brute_force_n8", |b| {
        b.iter(|| (0..256).map(|s| extracted_information(&f, s).unwrap()).sum::<usize>())
    });
    group.finish();
}

fn gradients(c: &mut Criterion) {
    let mut group = c.benchmark_group("log_prob_grad");
    let mut r = rng::seeded(3);
    for (n, d) in [(4usize, 1usize), (4, 3), (6, 2)] {
        let (policy, params, x) = raw_fixture(n, d, 2, 2);
        group.bench_function(format!("raw_n{n}_d{d}"), |b| {
            b.iter(|| policy.log_prob_grad(black_box(&x), 0, &params, &mut r).unwrap())
        });
    }
    group.finish();

    let (policy, params, _) = raw_fixture(4, 1, 2, 4);
    c.bench_function("empirical_fim_n4_d1_k100", |b| {
        b.iter(|| empirical_fim(&policy, &params, &StateSampler::uniform_angles(), 100, &mut r).unwrap())
    });
}

criterion_group!(benches, gates, prepare, decoding, gradients);
criterion_main!(benches);
