use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use descent_core::padic::Prime;
use descent_core::treegroup::{orbit, orbit_partition_check, SubsetTuple};
use descent_core::{beta_all, Engine, Limits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn bench_beta_all(c: &mut Criterion) {
    let mut group = c.benchmark_group("beta_all");
    for n in [10, 14, 16] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| beta_all(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn bench_power_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("power_sum");
    group.sample_size(20);
    for workers in [1, 4] {
        let engine = Engine::new(Limits::default(), workers);
        for n in [16, 20] {
            group.bench_with_input(
                BenchmarkId::new(format!("workers={workers}"), n),
                &n,
                |b, &n| b.iter(|| engine.compute(black_box(n), &[2, 5, 9]).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_orbits(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = SubsetTuple::random(&mut rng, 5, 9).unwrap();
    c.bench_function("orbit p=3 k=2 n=5", |b| {
        b.iter(|| orbit(black_box(&x), Prime::THREE, 2).unwrap())
    });
    let limits = Limits::default();
    c.bench_function("orbit_partition n=3 p=2 k=2", |b| {
        b.iter(|| orbit_partition_check(3, Prime::TWO, 2, &limits).unwrap())
    });
}

criterion_group!(benches, bench_beta_all, bench_power_sum, bench_orbits);
criterion_main!(benches);
