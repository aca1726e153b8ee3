use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rwrs_core::walk::{sample_return_times, simulate_path};
use rwrs_core::WalkSpec;

fn paths(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate_path");
    for d in [1, 3] {
        let spec = WalkSpec::simple(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        g.bench_with_input(BenchmarkId::new("n=10000", d), &spec, |b, spec| {
            b.iter(|| simulate_path(spec, black_box(10_000), &mut rng).unwrap())
        });
    }
    g.finish();
}

fn returns(c: &mut Criterion) {
    let spec = WalkSpec::simple(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("return_times d=3 horizon=1e6", |b| {
        b.iter(|| sample_return_times(&spec, black_box(1_000_000), 6, &mut rng).unwrap())
    });
}

criterion_group!(benches, paths, returns);
criterion_main!(benches);
