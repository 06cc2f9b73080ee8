use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use torus_lt::constants::{f_of_b, green_diag, k2, Flux};

fn constants(c: &mut Criterion) {
    let half = Flux::new(0.5).unwrap();
    let small = Flux::new(0.01).unwrap();
    c.bench_function("F(b, 0.5) at b = 1", |b| {
        b.iter(|| f_of_b(black_box(1.0), half, 1e-10).unwrap())
    });
    c.bench_function("K2(0.5)", |b| b.iter(|| k2(black_box(half)).unwrap()));
    c.bench_function("K2(0.01)", |b| b.iter(|| k2(black_box(small)).unwrap()));
    c.bench_function("Green diagonal, lambda = 10", |b| {
        b.iter(|| green_diag(black_box(10.0), 1.0, half).unwrap())
    });
}

criterion_group!(benches, constants);
criterion_main!(benches);
