use bgraph_bench::seeded_graph;
use bgraph_core::graph::{canonicalize, enumerate_classes};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_canonicalize(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonicalize");
    for n in [64usize, 256, 1024] {
        let g = seeded_graph(n, 3);
        group.sample_size(10);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| black_box(canonicalize(g).k))
        });
    }
    group.finish();
}

fn bench_enumerate(c: &mut Criterion) {
    c.bench_function("enumerate-n5", |b| {
        b.iter(|| black_box(enumerate_classes(5, 1).unwrap().labeled_total))
    });
}

criterion_group!(benches, bench_canonicalize, bench_enumerate);
criterion_main!(benches);
