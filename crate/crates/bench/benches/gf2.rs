use bgraph_bench::seeded_alternating;
use bgraph_core::gf2::congruent_canonicalize;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("gf2-rank");
    for n in [1024usize, 4096] {
        let m = seeded_alternating(n, 1);
        group.sample_size(10);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| black_box(m.rank()))
        });
    }
    group.finish();
}

fn bench_congruence(c: &mut Criterion) {
    let m = seeded_alternating(256, 2);
    c.bench_function("gf2-congruence-256", |b| {
        b.iter(|| black_box(congruent_canonicalize(&m).unwrap().0))
    });
}

criterion_group!(benches, bench_rank, bench_congruence);
criterion_main!(benches);
