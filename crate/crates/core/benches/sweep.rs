//! Parallel against sequential experiment sweeps.
//!
//! Without the `parallel` feature both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use drone_cvrp::bench::{run_comparison, ExperimentConfig};
use drone_cvrp::Method;

fn sweep(c: &mut Criterion) {
    let heuristic = ExperimentConfig {
        n_values: vec![10, 20, 30],
        runs_per_n: Some(8),
        methods: vec![Method::Gnn],
        ..ExperimentConfig::default()
    };
    let paired = ExperimentConfig {
        n_values: vec![10],
        runs_per_n: Some(4),
        methods: vec![Method::Exact, Method::Gnn],
        exact_time_limit: 10.0,
        ..ExperimentConfig::default()
    };

    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, cfg) in [("gnn", &heuristic), ("exact+gnn", &paired)] {
        for parallel in [true, false] {
            let label = if parallel { "parallel" } else { "sequential" };
            let cfg = ExperimentConfig { parallel, ..cfg.clone() };
            group.bench_with_input(BenchmarkId::new(name, label), &cfg, |b, cfg| {
                b.iter(|| run_comparison(black_box(cfg)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
