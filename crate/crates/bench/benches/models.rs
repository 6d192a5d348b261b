use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sealoss_bench::{campaign_context, campaign_samples};
use sealoss_core::fit::compare_models;
use sealoss_core::geometry::reflection_geometry;
use sealoss_core::models::{sweep, Spacing};
use sealoss_core::{EarthModel, LinkGeometry, Model};

fn bench_sweep(c: &mut Criterion) {
    let ctx = campaign_context();
    let mut group = c.benchmark_group("sweep_1000");
    for model in [Model::FreeSpace, Model::Bullington, Model::Rel, Model::ItuP2001] {
        group.bench_with_input(BenchmarkId::from_parameter(model.id()), &model, |b, m| {
            b.iter(|| sweep(m, &ctx, 10.0, 12_000.0, 1_000, Spacing::Log).unwrap())
        });
    }
    group.finish();
}

fn bench_reflection_geometry(c: &mut Criterion) {
    let g = LinkGeometry::new(0.35, 5.2, 6_000.0, EarthModel::default()).unwrap();
    c.bench_function("reflection_geometry", |b| b.iter(|| reflection_geometry(black_box(&g)).unwrap()));
}

fn bench_compare(c: &mut Criterion) {
    let ctx = campaign_context();
    let samples = campaign_samples(325);
    let models = [Model::FreeSpace, Model::Bullington, Model::Rel, Model::ItuP2001];
    c.bench_function("compare_models_325", |b| {
        b.iter(|| compare_models(black_box(&samples), &models, &ctx).unwrap())
    });
}

criterion_group!(benches, bench_sweep, bench_reflection_geometry, bench_compare);
criterion_main!(benches);
