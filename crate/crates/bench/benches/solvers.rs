use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use deltaline::objectives::table_benchmarks;
use deltaline::{
    bisection, delta_bisection, delta_secant, gd, golden_section, GdOptions, SolveOptions,
    StepRule,
};

fn one_dimensional(c: &mut Criterion) {
    let opts = SolveOptions::new(1e-10);
    let mut group = c.benchmark_group("table");
    group.bench_function("bisection", |b| {
        b.iter(|| {
            for bench in table_benchmarks() {
                black_box(bisection(&bench.objective(), bench.interval(), &opts).ok());
            }
        })
    });
    group.bench_function("delta_bisection", |b| {
        b.iter(|| {
            for bench in table_benchmarks() {
                black_box(delta_bisection(&bench.objective(), bench.interval(), &opts).ok());
            }
        })
    });
    group.bench_function("delta_secant", |b| {
        b.iter(|| {
            for bench in table_benchmarks() {
                black_box(delta_secant(&bench.value_objective(), bench.interval(), &opts).ok());
            }
        })
    });
    group.bench_function("golden_section", |b| {
        b.iter(|| {
            for bench in table_benchmarks() {
                black_box(golden_section(&bench.value_objective(), bench.interval(), &opts).ok());
            }
        })
    });
    group.finish();
}

fn descent(c: &mut Criterion) {
    let f = deltaline::objectives::exp_cosh(3.0);
    c.bench_function("gd_quasi_exact_cosh", |b| {
        let opts = GdOptions::new(StepRule::quasi_exact(1.0)).tol(1e-10);
        b.iter(|| black_box(gd(&f, &[100.0], &opts).ok()))
    });
}

criterion_group!(benches, one_dimensional, descent);
criterion_main!(benches);
