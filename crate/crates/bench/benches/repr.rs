use bgraph_bench::seeded_graph;
use bgraph_core::repr::Representation;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_pairs_verify(c: &mut Criterion) {
    let g = seeded_graph(5, 4);
    c.bench_function("rep-pairs-verify-n5", |b| {
        b.iter(|| {
            let rep = Representation::rep_pairs(&g).unwrap();
            black_box(rep.verify_relations().pass)
        })
    });
}

fn bench_canonical_suite(c: &mut Criterion) {
    let g = seeded_graph(8, 5);
    c.bench_function("rep-canonical-suite-n8", |b| {
        b.iter(|| {
            let rep = Representation::rep_canonical(&g).unwrap();
            black_box((rep.span_dimension().unwrap(), rep.commutant_dimension().unwrap()))
        })
    });
}

criterion_group!(benches, bench_pairs_verify, bench_canonical_suite);
criterion_main!(benches);
