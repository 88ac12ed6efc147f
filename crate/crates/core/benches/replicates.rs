use std::hint::black_box;

use cfpr::exec::{map_indexed, map_indexed_serial};
use cfpr::graph::suff_stats;
use cfpr::process::simulate_events;
use cfpr::rng::replicate_seed;
use cfpr::{ProcessParams, Variant};
use criterion::{criterion_group, criterion_main, Criterion};

fn replicate(params: &ProcessParams, k: usize) -> u64 {
    let state = simulate_events(params, 20.0, replicate_seed(7, 1, k as u64)).unwrap();
    suff_stats(&state.graph).t_e
}

fn bench_replicates(c: &mut Criterion) {
    let params = ProcessParams::with_persons_per_focus(100, 5.0, 1.0, 5.0, 25.0, Variant::Cfpr).unwrap();
    let reps = 32;
    let mut group = c.benchmark_group("replicates_n100");
    group.sample_size(10);
    group.bench_function("serial", |b| {
        b.iter(|| black_box(map_indexed_serial(reps, |k| replicate(&params, k))))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(map_indexed(reps, |k| replicate(&params, k))))
    });
    group.finish();
}

criterion_group!(benches, bench_replicates);
criterion_main!(benches);
