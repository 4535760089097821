//! Benchmarks for the grid- and boundary-parallel kernels. Run once with the
//! default features and once with `--no-default-features` to compare the
//! rayon and sequential code paths; the MODE suffix in the benchmark names
//! tells the two apart.

use criterion::{criterion_group, criterion_main, Criterion};
use lyapdecay::densela::spectral_norm;
use lyapdecay::models::{fd_operator, jordan_family};
use lyapdecay::spectral::{default_box, numerical_range, resolvent_grid};

#[cfg(feature = "parallel")]
const MODE: &str = "parallel";
#[cfg(not(feature = "parallel"))]
const MODE: &str = "sequential";

fn bench_numerical_range(c: &mut Criterion) {
    let a = fd_operator(64).unwrap().problem.a;
    c.bench_function(&format!("numerical_range_n64_m128/{MODE}"), |bench| {
        bench.iter(|| numerical_range(&a, 128).unwrap())
    });
}

fn bench_resolvent_grid(c: &mut Criterion) {
    let a = jordan_family(32, 2.0, None).unwrap().problem.a;
    let nr = numerical_range(&a, 64).unwrap();
    let gbox = default_box(&nr, 0.2, spectral_norm(&a).unwrap());
    c.bench_function(&format!("resolvent_grid_n32_r64/{MODE}"), |bench| {
        bench.iter(|| resolvent_grid(&a, gbox, 64).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_numerical_range, bench_resolvent_grid
}
criterion_main!(benches);
