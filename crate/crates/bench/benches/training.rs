use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use momentnet::inr::{draw_tuples, loss_and_grad};
use momentnet::rng::seeded;
use momentnet::{weights_from_moments, InrParams, MomentVector};
use std::hint::black_box;

fn loss_gradient(c: &mut Criterion) {
    let target = MomentVector::constant(0.3);
    let weights = weights_from_moments(&target, 1e-6);
    let mut group = c.benchmark_group("loss_and_grad");
    group.sample_size(20);
    for hidden in [16, 64] {
        let params = InrParams::init(hidden, 1).unwrap();
        let tuples = draw_tuples(5_000, &mut seeded(2));
        group.bench_with_input(BenchmarkId::new("L5000", hidden), &params, |b, p| {
            b.iter(|| loss_and_grad(black_box(p), &tuples, &target, &weights))
        });
    }
    group.finish();
}

fn forward(c: &mut Criterion) {
    let params = InrParams::init(64, 1).unwrap();
    c.bench_function("forward_canonical/H64", |b| {
        b.iter(|| params.forward_canonical(black_box(0.3), black_box(0.7)))
    });
}

criterion_group!(benches, loss_gradient, forward);
criterion_main!(benches);
