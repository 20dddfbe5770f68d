use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hsc_bench::{chaotic_params, near_steady_state};
use hsc_core::chareq::{complex_roots, linearize_at};
use hsc_core::dde::{integrate, IntegrateOptions};
use hsc_core::dynamics::{lyapunov_spectrum, LyapunovOptions};
use hsc_core::ModelParams;

fn integrator(c: &mut Criterion) {
    let p = chaotic_params();
    let opts = IntegrateOptions::default();
    c.bench_function("integrate 2000 days chaotic", |b| {
        b.iter(|| integrate(black_box(&p), near_steady_state(&p), 2000.0, &opts).unwrap())
    });
}

fn roots(c: &mut Criterion) {
    let p = ModelParams::table1();
    let coeffs = linearize_at(p.q_star().unwrap(), &p).unwrap();
    c.bench_function("complex roots to Im 30", |b| {
        b.iter(|| complex_roots(black_box(&coeffs), -3.0, 30.0).unwrap())
    });
}

fn lyapunov(c: &mut Criterion) {
    let p = chaotic_params();
    let opts = LyapunovOptions {
        m: 2,
        horizon: 1000.0,
        discard: 200.0,
        ..LyapunovOptions::default()
    };
    let mut g = c.benchmark_group("lyapunov");
    g.sample_size(10);
    g.bench_function("two exponents over 1000 days", |b| {
        b.iter(|| lyapunov_spectrum(black_box(&p), near_steady_state(&p), &opts).unwrap())
    });
    g.finish();
}

criterion_group!(benches, integrator, roots, lyapunov);
criterion_main!(benches);
