use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracext::bessel::bessel_ik;
use fracext::synthesis::{radial_functional, FunctionalKind};
use fracext::{gauss_jacobi_rule, solve_mode, Cutoff, MeshControls, ModeProblem};
use fracext_bench::{gaussian3, sample_params};
use std::hint::black_box;

fn bessel(c: &mut Criterion) {
    let mut g = c.benchmark_group("bessel_ik");
    for x in [0.5, 5.0, 50.0] {
        g.bench_with_input(BenchmarkId::from_parameter(x), &x, |b, &x| b.iter(|| bessel_ik(black_box(0.3), x)));
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("gauss_jacobi_rule");
    for n in [4, 12, 32] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| gauss_jacobi_rule(n, black_box(-0.5))));
    }
    g.finish();
}

fn mode(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_mode");
    g.sample_size(20);
    for p in sample_params() {
        let prob = ModeProblem::new(1.0, p, Cutoff::Finite(8.0), 1.0).unwrap();
        let mesh = MeshControls::default().mesh(1.0, 8.0, p.beta()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(p.beta()), &prob, |b, prob| {
            b.iter(|| solve_mode(prob, mesh.partition()))
        });
    }
    g.finish();
}

fn synthesis(c: &mut Criterion) {
    let mut g = c.benchmark_group("radial_functional");
    g.sample_size(10);
    let f = gaussian3();
    for p in sample_params() {
        g.bench_with_input(BenchmarkId::from_parameter(p.beta()), &p, |b, p| {
            b.iter(|| radial_functional(&f, p, Cutoff::Finite(4.0), FunctionalKind::TruncationError))
        });
    }
    g.finish();
}

criterion_group!(benches, bessel, quadrature, mode, synthesis);
criterion_main!(benches);
