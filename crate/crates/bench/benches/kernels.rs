use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use faddeev_bench::{bump_state, gaussian_profile, packet_field};
use faddeev_core::evolution::{evolve, rhs_u, rhs_v, Form};
use faddeev_core::hyperbolic::{composite_x_norm, st_transform};

fn hankel(c: &mut Criterion) {
    let mut g = c.benchmark_group("hankel_forward");
    for n in [256, 1024, 2048] {
        let (sg, f) = gaussian_profile(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| sg.forward(black_box(f)).unwrap()));
    }
    g.finish();
}

fn rhs(c: &mut Criterion) {
    let mut g = c.benchmark_group("rhs");
    for n in [1024, 4096] {
        let (u, _) = bump_state(n, Form::U, 1);
        let (v, _) = bump_state(n, Form::V, 1);
        g.bench_with_input(BenchmarkId::new("u", n), &u, |b, s| b.iter(|| rhs_u(black_box(s)).unwrap()));
        g.bench_with_input(BenchmarkId::new("v", n), &v, |b, s| b.iter(|| rhs_v(black_box(s)).unwrap()));
    }
    g.finish();
}

fn evolve_steps(c: &mut Criterion) {
    let (state, cfg) = bump_state(4096, Form::U, 10);
    c.bench_function("evolve_rk4_10_steps_4096", |b| b.iter(|| evolve(black_box(&state), &cfg).unwrap()));
}

fn spacetime(c: &mut Criterion) {
    let w = packet_field();
    let mut g = c.benchmark_group("spacetime");
    g.sample_size(10);
    g.bench_function("st_transform", |b| b.iter(|| st_transform(black_box(&w)).unwrap()));
    g.bench_function("composite_x_norm", |b| b.iter(|| composite_x_norm(black_box(&w)).unwrap()));
    g.finish();
}

criterion_group!(benches, hankel, rhs, evolve_steps, spacetime);
criterion_main!(benches);
