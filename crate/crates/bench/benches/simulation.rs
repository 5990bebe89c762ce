use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lpplab_core::{estimate_cdf, last_passage_time, sample_weights, Geometry, ModelParams};

fn passage(c: &mut Criterion) {
    let p = ModelParams::iid(Geometry::Flat, 32, 0.5).unwrap();
    let w = sample_weights(&p, 7);
    c.bench_function("last_passage_time N=32", |b| b.iter(|| last_passage_time(black_box(&w))));
    c.bench_function("sample_weights N=32", |b| b.iter(|| sample_weights(&p, black_box(7))));
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    let p = ModelParams::iid(Geometry::HalfFlat, 8, 0.5).unwrap();
    g.bench_function("estimate_cdf 1e5 samples N=8", |b| b.iter(|| estimate_cdf(&p, &[30.0, 32.0, 34.0], 100_000, 1)));
    g.finish();
}

criterion_group!(benches, passage, monte_carlo);
criterion_main!(benches);
