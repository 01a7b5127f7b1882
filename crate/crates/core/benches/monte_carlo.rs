use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gaussconv::conic::{ConicSamples, PolyhedralCone};
use gaussconv::gauss::SeededStream;
use gaussconv::par;
use gaussconv::wills::{fixtures, wills_mc};
use rand_distr::{Distribution, StandardNormal};

const N: usize = 50_000;

fn one_thread() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool")
}

/// The chunked loop the crate falls back to without the `parallel` feature.
fn sequential_sq_norm(stream: SeededStream, dim: usize, n: usize) -> f64 {
    (0..par::chunk_count(n))
        .map(|j| {
            let mut rng = stream.chunk(j).rng();
            par::chunk_range(j, n)
                .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).map(|v: f64| v * v).sum::<f64>())
                .sum::<f64>()
        })
        .sum()
}

fn gaussian_draws(c: &mut Criterion) {
    let stream = SeededStream::new(0);
    let pool = one_thread();
    let mut g = c.benchmark_group("gaussian_sq_norm");
    for dim in [2, 10] {
        g.bench_with_input(BenchmarkId::new("rayon", dim), &dim, |b, &d| {
            b.iter(|| stream.map_gaussian(d, N, |z| z.iter().map(|v| v * v).sum::<f64>()).iter().sum::<f64>())
        });
        g.bench_with_input(BenchmarkId::new("rayon_1_thread", dim), &dim, |b, &d| {
            b.iter(|| {
                pool.install(|| stream.map_gaussian(d, N, |z| z.iter().map(|v| v * v).sum::<f64>()).iter().sum::<f64>())
            })
        });
        g.bench_with_input(BenchmarkId::new("sequential", dim), &dim, |b, &d| {
            b.iter(|| sequential_sq_norm(black_box(stream), d, N))
        });
    }
    g.finish();
}

fn conic_profile(c: &mut Criterion) {
    let cone = PolyhedralCone::random_pointed(5, 8, SeededStream::new(1)).expect("cone");
    let stream = SeededStream::new(2);
    let pool = one_thread();
    let mut g = c.benchmark_group("conic_profile");
    g.sample_size(10);
    g.bench_function("rayon", |b| b.iter(|| ConicSamples::draw(&cone, N, stream).unwrap().profile()));
    g.bench_function("rayon_1_thread", |b| {
        b.iter(|| pool.install(|| ConicSamples::draw(&cone, N, stream).unwrap().profile()))
    });
    g.finish();
}

fn wills(c: &mut Criterion) {
    let body = fixtures::triangle();
    let stream = SeededStream::new(3);
    let pool = one_thread();
    let mut g = c.benchmark_group("wills_mc");
    g.sample_size(10);
    g.bench_function("rayon", |b| b.iter(|| wills_mc(&body, N, stream).unwrap()));
    g.bench_function("rayon_1_thread", |b| b.iter(|| pool.install(|| wills_mc(&body, N, stream).unwrap())));
    g.finish();
}

criterion_group!(benches, gaussian_draws, conic_profile, wills);
criterion_main!(benches);
