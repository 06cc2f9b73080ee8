use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use torus_lt::constants::Flux;
use torus_lt::operator::{assemble_1d, assemble_2d, TorusGeometry};
use torus_lt::sampling::{random_potential_1d, random_potential_2d, rng_for};
use torus_lt::spectrum::eigs_hermitian;

fn one_d(c: &mut Criterion) {
    let g = TorusGeometry::circle(2.0 * PI).unwrap();
    let a = Flux::new(0.3).unwrap();
    let v = random_potential_1d(&mut rng_for(1), 8, 100.0);
    let mut group = c.benchmark_group("assemble + eigs, 1D");
    for n in [16, 64, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(2 * n + 1), &n, |b, &n| {
            b.iter(|| eigs_hermitian(&assemble_1d(black_box(n), &g, a, &v).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn two_d(c: &mut Criterion) {
    let g = TorusGeometry::torus(2.0 * PI, 8.0 * PI).unwrap();
    let fl = [Flux::new(0.3).unwrap(), Flux::new(0.7).unwrap()];
    let v = random_potential_2d(&mut rng_for(2), [2, 2], 4.0);
    let mut group = c.benchmark_group("assemble + eigs, 2D");
    group.sample_size(10);
    for n in [[4, 12], [8, 24]] {
        let dim = (2 * n[0] + 1) * (2 * n[1] + 1);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &n, |b, &n| {
            b.iter(|| eigs_hermitian(&assemble_2d(black_box(n), &g, fl, &v).unwrap()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, one_d, two_d);
criterion_main!(benches);
