use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fikit::hamiltonian::ConvexOneDim;
use fikit::hopf_lax::{hopf_lax_with, HopfLaxOptions};
use fikit::space::{build_grid_1d, build_grid_2d, metric_subgradient_with, MetricSpace, Neighborhood, ScalarField};
use fikit::Exec;
use std::hint::black_box;

fn datum(space: &MetricSpace) -> ScalarField {
    let v = (0..space.len()).map(|i| (0.37 * i as f64).sin() + 0.001 * i as f64).collect();
    ScalarField::new(v).unwrap()
}

fn policies() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn hopf_lax(c: &mut Criterion) {
    let l = ConvexOneDim::power(2.0).unwrap();
    let mut group = c.benchmark_group("hopf_lax");
    for space in [build_grid_1d(-6.0, 6.0, 1201).unwrap(), build_grid_2d(-2.0, 2.0, 35, -2.0, 2.0, 35).unwrap()] {
        let g = datum(&space);
        for (name, exec) in policies() {
            let opts = HopfLaxOptions { exec, prune: false };
            group.bench_with_input(BenchmarkId::new(name, space.len()), &space, |b, s| {
                b.iter(|| hopf_lax_with(black_box(s), &g, 0.5, &l, opts).unwrap())
            });
        }
    }
    group.finish();
}

fn subgradient(c: &mut Criterion) {
    let space = build_grid_1d(-6.0, 6.0, 1201).unwrap();
    let f = datum(&space);
    let mut group = c.benchmark_group("global_subgradient");
    for (name, exec) in policies() {
        group.bench_function(name, |b| {
            b.iter(|| metric_subgradient_with(black_box(&f), &space, Neighborhood::Global, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = hopf_lax, subgradient
}
criterion_main!(benches);
