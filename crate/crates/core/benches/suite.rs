use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use relkit::harness::{run_suite_sequential, GeneratorConfig, RelationClass};
use relkit::Tolerances;

fn config(class: RelationClass) -> GeneratorConfig {
    GeneratorConfig {
        dim: 6,
        mul_dim: 2,
        graph_dim: None,
        seed: 7,
        trials: 16,
        class,
    }
}

fn sequential_vs_parallel(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for class in [RelationClass::Generic, RelationClass::GammaAdmissible, RelationClass::All] {
        let cfg = config(class);
        group.bench_with_input(BenchmarkId::new("sequential", class), &cfg, |b, cfg| {
            b.iter(|| run_suite_sequential(cfg, &tol).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", class), &cfg, |b, cfg| {
            b.iter(|| relkit::harness::run_suite_parallel(cfg, &tol).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sequential_vs_parallel);
criterion_main!(benches);
