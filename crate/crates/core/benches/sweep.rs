use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use qszilard::{PointParams, Spacing, SweepAxis, SweepParam};

fn grid() -> (PointParams, [SweepAxis; 2]) {
    let base = PointParams::default();
    let axes = [
        SweepAxis::new(SweepParam::Insertion, 0.02, 0.98, 50, Spacing::Linear).unwrap(),
        SweepAxis::new(SweepParam::BathBeta, 1.0, 5.0, 50, Spacing::Linear).unwrap(),
    ];
    (base, axes)
}

fn bench_sweep(c: &mut Criterion) {
    let (base, axes) = grid();
    let mut group = c.benchmark_group("sweep_50x50");
    group
        .sample_size(10)
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(5));

    group.bench_function("sequential", |b| {
        b.iter(|| qszilard::run_sweep_sequential(black_box(&base), black_box(&axes)))
    });

    #[cfg(feature = "parallel")]
    group.bench_function("parallel_default_pool", |b| {
        b.iter(|| qszilard::run_sweep(black_box(&base), black_box(&axes), 0).unwrap())
    });

    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
