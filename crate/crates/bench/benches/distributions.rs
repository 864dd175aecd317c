use std::hint::black_box;

use bellpauli::{bell_outcome_distribution, make_t_doped, pauli_distribution, random_clifford, rng_from_seed};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn pauli_tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("pauli_distribution");
    for n in [4, 6, 8, 10] {
        let s = make_t_doped(n, 2, &mut rng_from_seed(n as u64)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| {
            b.iter(|| pauli_distribution(black_box(s)).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("bell_outcome_distribution");
    for n in [4, 6, 8] {
        let s = make_t_doped(n, 2, &mut rng_from_seed(n as u64)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| {
            b.iter(|| bell_outcome_distribution(black_box(s), s).unwrap())
        });
    }
    g.finish();
}

fn cliffords(c: &mut Criterion) {
    let mut g = c.benchmark_group("random_clifford");
    for n in [2, 6, 12] {
        let mut rng = rng_from_seed(7);
        g.bench_function(BenchmarkId::from_parameter(n), |b| b.iter(|| random_clifford(n, &mut rng)));
    }
    g.finish();
}

criterion_group!(benches, pauli_tables, cliffords);
criterion_main!(benches);
