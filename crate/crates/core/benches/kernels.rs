//! Dense kernels on the global rayon pool versus a one-thread pool.
//!
//! Build with `--no-default-features` to time the sequential fallback itself.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cholqr::dense::{cholesky_upper, gram, matmul, solve_right_triangular, Matrix};
use cholqr::testbed::generate;

fn pools() -> Vec<(&'static str, Option<rayon_pool::Pool>)> {
    vec![("global", None), ("one-thread", Some(rayon_pool::single()))]
}

#[cfg(feature = "parallel")]
mod rayon_pool {
    pub type Pool = rayon::ThreadPool;

    pub fn single() -> Pool {
        rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool")
    }

    pub fn run<R: Send>(pool: Option<&Pool>, f: impl FnOnce() -> R + Send) -> R {
        match pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod rayon_pool {
    pub type Pool = ();

    pub fn single() -> Pool {}

    pub fn run<R: Send>(_: Option<&Pool>, f: impl FnOnce() -> R + Send) -> R {
        f()
    }
}

fn bench_kernels(c: &mut Criterion) {
    let a = generate(4000, 200, 1e4, 1).unwrap().matrix;
    let w = gram(a.view());
    let r = cholesky_upper(w.view()).unwrap();
    let b = Matrix::from_fn(200, 200, |i, j| ((i + 2 * j) % 7) as f64);

    let mut group = c.benchmark_group("kernels");
    group.sample_size(20);
    for (name, pool) in pools() {
        let pool = pool.as_ref();
        group.bench_with_input(BenchmarkId::new("gram_4000x200", name), &(), |bench, _| {
            bench.iter(|| rayon_pool::run(pool, || gram(black_box(a.view()))))
        });
        group.bench_with_input(BenchmarkId::new("solve_4000x200", name), &(), |bench, _| {
            bench.iter(|| rayon_pool::run(pool, || solve_right_triangular(black_box(a.view()), &r).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("matmul_4000x200x200", name), &(), |bench, _| {
            bench.iter(|| rayon_pool::run(pool, || matmul(black_box(a.view()), b.view(), false).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("cholesky_200", name), &(), |bench, _| {
            bench.iter(|| rayon_pool::run(pool, || cholesky_upper(black_box(w.view())).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_kernels);
criterion_main!(benches);
