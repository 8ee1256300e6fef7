//! Trial sampling through the rayon pool against the single-threaded path.
//!
//! Run with `cargo bench -p weave-core`. Without the `parallel` feature both
//! variants run on one thread.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use weave_core::graph::MeasurementBasis;
use weave_core::protocols::{sample, sample_sequential, BlockKind, ChainSpec, Job, JointPlan, Protocol};

fn jobs() -> Vec<(&'static str, Job)> {
    vec![
        ("ghz5", Job::Protocol(Protocol::Ghz { users: 5, server: false })),
        (
            "chain4",
            Job::Chain(ChainSpec::new(
                vec![BlockKind::Path4; 4],
                vec![JointPlan::Measure(MeasurementBasis::Y); 3],
                false,
            )),
        ),
    ]
}

fn trials(c: &mut Criterion) {
    let n = 2_000;
    let mut group = c.benchmark_group("monte_carlo");
    group.throughput(Throughput::Elements(n));
    group.sample_size(10);
    for (name, job) in jobs() {
        group.bench_with_input(BenchmarkId::new("parallel", name), &job, |b, job| {
            b.iter(|| sample(black_box(job), n, 7).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", name), &job, |b, job| {
            b.iter(|| sample_sequential(black_box(job), n, 7).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
