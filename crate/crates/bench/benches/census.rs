use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use momentnet::{brute_force_counts, census, count_induced};
use momentnet_bench::{dense_dataset, sparse_graph};
use std::hint::black_box;

fn sparse_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_induced/sparse_deg8");
    for n in [100, 200, 400, 800] {
        let g = sparse_graph(n, 8.0, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| count_induced(black_box(g))));
    }
    group.finish();
}

fn dense_census(c: &mut Criterion) {
    let graphs = dense_dataset(4, 150, 10, 1);
    c.bench_function("census/graphon4_10x150", |b| b.iter(|| census(black_box(&graphs)).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let g = sparse_graph(20, 6.0, 3);
    let mut group = c.benchmark_group("oracle_n20");
    group.bench_function("fast", |b| b.iter(|| count_induced(black_box(&g))));
    group.bench_function("brute_force", |b| b.iter(|| brute_force_counts(black_box(&g)).unwrap()));
    group.finish();
}

criterion_group!(benches, sparse_scaling, dense_census, oracle);
criterion_main!(benches);
