use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use newton_ensemble::ensemble::roots::aberth_roots;
use newton_ensemble::ensemble::{Sampler, SampleStream};
use newton_ensemble::oracles::OracleCase;
use newton_ensemble::szego::KernelEvaluator;
use newton_ensemble::{LatticePolytope, RegionSolver};

fn kernel(c: &mut Criterion) {
    let square = OracleCase::Square.polytope();
    let mut group = c.benchmark_group("kernel_diag");
    for n in [10, 50, 200] {
        let ev = KernelEvaluator::new(&square, n).unwrap();
        group.bench_with_input(BenchmarkId::new("square", n), &ev, |b, ev| b.iter(|| ev.kernel_diag(black_box(&[0.3, 1.7]))));
    }
    group.finish();
}

fn regions(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_region");
    for case in [OracleCase::Square, OracleCase::Hirzebruch(3)] {
        let solver = RegionSolver::new(&case.polytope()).unwrap();
        group.bench_function(BenchmarkId::new("forbidden", case.name()), |b| b.iter(|| solver.solve(black_box(&[1.5, 4.0]))));
        group.bench_function(BenchmarkId::new("allowed", case.name()), |b| b.iter(|| solver.solve(black_box(&[-1.0, -1.0]))));
    }
    let solver = RegionSolver::new(&OracleCase::Square.polytope()).unwrap();
    group.bench_function("psi_hessian/square", |b| b.iter(|| solver.psi_hessian(black_box(&[1.5, 4.0]))));
    group.finish();
}

fn roots(c: &mut Criterion) {
    let segment = LatticePolytope::from_vertices(&[vec![1], vec![2]]).unwrap();
    let mut group = c.benchmark_group("aberth_roots");
    for n in [20, 40, 160] {
        let sampler = Sampler::new(&segment, n).unwrap();
        let f = sampler.draw(&mut SampleStream::new(1, 0));
        let mut dense = vec![num_complex::Complex64::ZERO; (2 * n + 1) as usize];
        for (a, c) in f.support.iter().zip(&f.coefficients) {
            dense[a[0] as usize] = *c;
        }
        group.bench_with_input(BenchmarkId::from_parameter(n), &dense, |b, d| b.iter(|| aberth_roots(black_box(d))));
    }
    group.finish();
}

criterion_group!(benches, kernel, regions, roots);
criterion_main!(benches);
