use std::hint::black_box;

use coph_core::theory::{e_tilde, variance_coph, variance_exact, variance_reden, DensifiedScheme};
use coph_core::TheoryConfig;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn pair_collision(c: &mut Criterion) {
    let mut group = c.benchmark_group("e_tilde");
    for d in [16, 64, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| e_tilde(black_box(d / 4), black_box(d / 2), d))
        });
    }
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("variance");
    group.sample_size(10);
    for (dim, bins, a, f) in [(64, 4, 8, 24), (1024, 16, 128, 512), (4096, 64, 1024, 2048)] {
        let cfg = TheoryConfig::new(dim, bins, a, f).unwrap();
        let id = format!("D={dim},K={bins}");
        group.bench_with_input(BenchmarkId::new("coph", &id), &cfg, |b, cfg| {
            b.iter(|| variance_coph(cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("reden", &id), &cfg, |b, cfg| {
            b.iter(|| variance_reden(cfg).unwrap())
        });
    }
    let small = TheoryConfig::new(64, 4, 8, 24).unwrap();
    group.bench_function("exact/D=64,K=4", |b| {
        b.iter(|| variance_exact(black_box(&small), DensifiedScheme::Circulant).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pair_collision, closed_forms);
criterion_main!(benches);
