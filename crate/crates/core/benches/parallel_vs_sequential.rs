use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use disk_sssp::arbitrary::{solve_arbitrary_with, ArbitraryConfig};
use disk_sssp::bounded::{solve_bounded_with, BoundedConfig};
use disk_sssp::exec::Execution;
use disk_sssp::generate::{generate, GenKind, GeneratorSpec};
use disk_sssp::model::VertexId;
use disk_sssp::update::{update, DistStore, LabeledVertex, UpdateStrategy};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for (kind, n, psi) in [
        (GenKind::Clique, 4096, 1.0),
        (GenKind::UniformSquare, 8192, 64.0),
    ] {
        let inst = generate(&GeneratorSpec::new(kind, n, psi, 1)).unwrap();
        for (name, exec) in MODES {
            let id = BenchmarkId::new(format!("bounded/{name}"), format!("{kind}-{n}"));
            group.bench_function(id, |b| {
                b.iter(|| {
                    solve_bounded_with(
                        &inst,
                        BoundedConfig {
                            exec,
                            ..Default::default()
                        },
                    )
                })
            });
            let id = BenchmarkId::new(format!("arbitrary/{name}"), format!("{kind}-{n}"));
            group.bench_function(id, |b| {
                b.iter(|| {
                    solve_arbitrary_with(
                        &inst,
                        ArbitraryConfig {
                            exec,
                            ..Default::default()
                        },
                    )
                })
            });
        }
    }
    group.finish();
}

fn update_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("update");
    group.sample_size(10);
    let n = 20_000;
    let inst = generate(&GeneratorSpec::new(GenKind::UniformSquare, n, 16.0, 2)).unwrap();
    let sources: Vec<LabeledVertex> = (0..n / 2)
        .map(|i| LabeledVertex::of(&inst, VertexId::from_index(i), (i % 97) as f64))
        .collect();
    let targets: Vec<VertexId> = (n / 2..n).map(VertexId::from_index).collect();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| {
                let mut dist = vec![f64::INFINITY; n];
                let mut prev = vec![None; n];
                update(
                    &inst,
                    &sources,
                    &targets,
                    &mut DistStore {
                        dist: &mut dist,
                        prev: &mut prev,
                    },
                    UpdateStrategy::Tree,
                    exec,
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, solvers, update_batches);
criterion_main!(benches);
