use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use polytrack_core::poly::RealPolynomial;
use polytrack_core::rate::{sup_rate_with, DEFAULT_GRID};
use polytrack_core::sim::{default_init, run, QuadraticCostSpec};
use polytrack_core::synth::synthesize;

fn bench_synthesize(c: &mut Criterion) {
    c.bench_function("synthesize m=1 L=5 n=4", |b| {
        b.iter(|| synthesize(black_box(1.0), black_box(5.0), black_box(4)).unwrap())
    });
}

fn bench_roots(c: &mut Criterion) {
    let s = synthesize(1.0, 5.0, 4).unwrap();
    let model = s.params.transfer().unwrap();
    let p: RealPolynomial = model.char_poly(3.0);
    c.bench_function("roots of degree-8 characteristic polynomial", |b| {
        b.iter(|| black_box(&p).roots().unwrap())
    });
}

fn bench_sup_rate(c: &mut Criterion) {
    let s = synthesize(1.0, 5.0, 4).unwrap();
    let model = s.params.transfer().unwrap();
    let mut group = c.benchmark_group("sup_rate");
    group.sample_size(10);
    group.bench_function("optimal n=4, default grid", |b| {
        b.iter(|| sup_rate_with(&model, 1.0, 5.0, DEFAULT_GRID, Some(4)).unwrap())
    });
    group.finish();
}

fn bench_simulation(c: &mut Criterion) {
    let s = synthesize(1.0, 5.0, 4).unwrap();
    let spec = QuadraticCostSpec::scalar(1.0, &[0.0, 1.0, 0.0, -1.0 / 3.0]).unwrap();
    let init = default_init(s.params.k, &spec, None).unwrap();
    c.bench_function("simulate optimal n=4, T=300", |b| {
        b.iter(|| run(&s.params, &spec, 300, &init).unwrap())
    });
}

criterion_group!(benches, bench_synthesize, bench_roots, bench_sup_rate, bench_simulation);
criterion_main!(benches);
