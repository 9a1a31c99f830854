//! Parallel vs sequential Hessian sweeps over the same seeded sample set.
//! Run with `--no-default-features` to see the pure sequential build.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use disc_tc::verify::{hessian_sweep, hessian_sweep_seq, SweepOptions};
use disc_tc::SparsePoly;

fn sample_delta() -> SparsePoly {
    // z1^2 - z2*z3
    SparsePoly::from_real_terms(3, [(vec![2, 0, 0], 1.0), (vec![0, 1, 1], -1.0)]).unwrap()
}

fn bench_sweeps(c: &mut Criterion) {
    let delta = sample_delta();
    let mut group = c.benchmark_group("hessian_sweep");
    for &samples in &[100usize, 400] {
        let opts = SweepOptions {
            samples,
            seed: 42,
            ..SweepOptions::default()
        };
        group.bench_with_input(BenchmarkId::new("parallel", samples), &opts, |b, opts| {
            b.iter(|| hessian_sweep(&delta, opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", samples), &opts, |b, opts| {
            b.iter(|| hessian_sweep_seq(&delta, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweeps);
criterion_main!(benches);
