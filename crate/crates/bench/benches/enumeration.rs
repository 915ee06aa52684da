use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pbox_core::oracle::oracle_extremes;
use pbox_core::rational::frac;
use pbox_core::{enumerate_extremes, lower_expectation, Gamble, Method, PBox};

/// A staircase p-box on `n` points with a band of width roughly 1/3.
fn staircase(n: usize) -> PBox {
    let n64 = n as i64;
    let low = (1..=n64)
        .map(|k| if k == n64 { frac(1, 1) } else { frac((3 * k - n64).max(0), 3 * n64) })
        .collect();
    let up = (1..=n64)
        .map(|k| frac((3 * k + n64).min(3 * n64), 3 * n64))
        .collect();
    PBox::from_bounds(low, up).unwrap()
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_extremes");
    for n in [4, 6, 8] {
        let p = staircase(n);
        for m in [Method::Structural, Method::Bfs] {
            group.bench_with_input(BenchmarkId::new(m.to_string(), n), &p, |b, p| {
                b.iter(|| enumerate_extremes(p, m).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_extremes");
    group.sample_size(10);
    for n in [4, 6] {
        let p = staircase(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| oracle_extremes(p).unwrap())
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("lower_expectation");
    for n in [4, 6, 8] {
        let p = staircase(n);
        let h = Gamble::from_values((0..n as i64).map(|k| frac((k * 7) % 5 - 2, 1)).collect())
            .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &(p, h), |b, (p, h)| {
            b.iter(|| lower_expectation(h, p).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, oracle, bounds);
criterion_main!(benches);
