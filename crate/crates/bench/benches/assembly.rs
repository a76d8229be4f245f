use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iwg_bench::{mesh, system};
use iwg_core::experiment::build_space;
use iwg_core::{solve, CircleProblem, RunOptions, SharpEdgeProblem, SolverKind, SolverOptions};

fn space_construction(c: &mut Criterion) {
    let p = CircleProblem::new(1.0, 10.0).unwrap();
    let mut group = c.benchmark_group("build_space");
    for n in [32, 64] {
        let m = mesh(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| build_space(m, &p, &RunOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let p = SharpEdgeProblem::default();
    let mut group = c.benchmark_group("assemble");
    for n in [32, 64] {
        let m = mesh(n);
        for parallel in [false, true] {
            let id = BenchmarkId::new(if parallel { "parallel" } else { "serial" }, n);
            group.bench_with_input(id, &m, |b, m| b.iter(|| system(&p, m, parallel)));
        }
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let p = CircleProblem::new(1.0, 1000.0).unwrap();
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for n in [32, 64] {
        let sys = system(&p, &mesh(n), false);
        for (name, kind) in [("cholesky", SolverKind::Cholesky), ("cg", SolverKind::Cg)] {
            let opts = SolverOptions { kind: Some(kind), ..Default::default() };
            group.bench_with_input(BenchmarkId::new(name, n), &sys, |b, s| {
                b.iter(|| solve(&s.matrix, &s.rhs, &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, space_construction, assembly, solvers);
criterion_main!(benches);
