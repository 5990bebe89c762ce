use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lpplab_core::fredholm::finite::FiniteKernel;
use lpplab_core::fredholm::Kernel;
use lpplab_core::{airy_ai, cdf_exact, f1, f21, fredholm_cdf_finite_n, j_n, Geometry, ModelParams};

fn airy(c: &mut Criterion) {
    c.bench_function("airy_ai series", |b| b.iter(|| airy_ai(black_box(1.3))));
    c.bench_function("airy_ai saddle", |b| b.iter(|| airy_ai(black_box(-9.7))));
}

fn limits(c: &mut Criterion) {
    let mut g = c.benchmark_group("limits");
    g.sample_size(10);
    g.bench_function("f1(-1)", |b| b.iter(|| f1(black_box(-1.0))));
    g.bench_function("f21(-1)", |b| b.iter(|| f21(black_box(-1.0))));
    g.bench_function("j_n(1000)", |b| b.iter(|| j_n(1000, 0.5, black_box(1.0))));
    g.finish();
}

fn finite(c: &mut Criterion) {
    let mut g = c.benchmark_group("finite");
    g.sample_size(10);
    let p = ModelParams::iid(Geometry::Flat, 8, 0.5).unwrap();
    let k = FiniteKernel::new(&p, 32.0, 256).unwrap();
    let nodes: Vec<f64> = (0..64).map(|i| 0.5 * i as f64).collect();
    g.bench_function("kernel matrix 64x64, N=8", |b| b.iter(|| k.matrix(&nodes, &nodes)));
    g.bench_function("fredholm cdf N=8", |b| b.iter(|| fredholm_cdf_finite_n(&p, black_box(32.0))));
    let q = ModelParams::new(Geometry::Flat, vec![0.5, 0.9, 1.3], vec![0.7, 1.1, 1.45]).unwrap();
    g.bench_function("cdf_exact N=3", |b| b.iter(|| cdf_exact(&q, black_box(4.0))));
    g.finish();
}

criterion_group!(benches, airy, limits, finite);
criterion_main!(benches);
