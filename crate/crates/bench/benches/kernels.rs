use criterion::{black_box, criterion_group, criterion_main, Criterion};

use itostrat::coefficients::{differentiate, parse_expr, simplify};
use itostrat::simulate::{ensemble, simulate_ito, GaussianStream};
use itostrat::{
    accessibility_integral, boundary_report, ito_to_stratonovich, solve_mean_absorption_time,
    BoundaryConditions,
};
use itostrat_bench::{feller, logistic, logistic_drift};

fn symbolic(c: &mut Criterion) {
    let text = "x*(1-x)*exp(-x^2/2) + sqrt(1 + x^2)*log(2 + x)";
    c.bench_function("parse", |b| b.iter(|| parse_expr(black_box(text)).unwrap()));
    let e = parse_expr(text).unwrap();
    c.bench_function("differentiate+simplify", |b| {
        b.iter(|| simplify(&differentiate(black_box(&e))))
    });
    let s = logistic_drift();
    c.bench_function("ito_to_stratonovich", |b| {
        b.iter(|| ito_to_stratonovich(black_box(&s)).unwrap())
    });
}

fn boundary(c: &mut Criterion) {
    let s = feller();
    c.bench_function("accessibility_integral eps=1e-6", |b| {
        b.iter(|| accessibility_integral(black_box(&s), 0.0, 1.0, 1e-6).unwrap())
    });
    let s = logistic_drift();
    c.bench_function("boundary_report", |b| {
        b.iter(|| boundary_report(black_box(&s), 0.0).unwrap())
    });
}

fn meantime(c: &mut Criterion) {
    let s = logistic();
    for n in [99, 999] {
        c.bench_function(&format!("mean time n={n}"), |b| {
            b.iter(|| solve_mean_absorption_time(black_box(&s), n, BoundaryConditions::auto()).unwrap())
        });
    }
}

fn simulation(c: &mut Criterion) {
    let s = logistic();
    c.bench_function("single path 10^4 steps", |b| {
        b.iter(|| {
            let mut noise = GaussianStream::new(42, 0);
            simulate_ito(black_box(&s), 0.5, 1e-4, 1.0, &mut noise).unwrap()
        })
    });
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    group.bench_function("logistic 1000 paths dt=1e-3", |b| {
        b.iter(|| ensemble(black_box(&s), 0.5, 1000, 1e-3, 20.0, 42).unwrap())
    });
    group.finish();
}

criterion_group!(benches, symbolic, boundary, meantime, simulation);
criterion_main!(benches);
