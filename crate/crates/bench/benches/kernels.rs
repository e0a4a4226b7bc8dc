use std::hint::black_box;

use ancient_bench::{random_solution, uniform};
use ancient_core::ancient_eval::{check_cm, default_cm_step};
use ancient_core::caloric_poly::{caloric_extend, CaloricSystem, MultiPoly};
use ancient_core::fd_engine::{forward_solve, GridSpec};
use ancient_core::field::FnField;
use ancient_core::laplace_bernstein::{recover_h, InversionConfig};
use ancient_core::parabolic_geometry::{gram, Paraboloid, QuadSpec};
use ancient_core::SpaceTimeField;
use criterion::{criterion_group, criterion_main, Criterion};

fn evaluation(c: &mut Criterion) {
    let u = random_solution(3, 20, 1);
    c.bench_function("eval 20 atoms in R^3", |b| b.iter(|| u.eval(black_box(&[0.1, -0.2, 0.3]), -1.0)));
    let grid = uniform(0.5, 5.0, 10);
    let step = default_cm_step(&grid, 8);
    let x = [0.1, -0.2, 0.3];
    c.bench_function("complete monotonicity order 8", |b| {
        b.iter(|| check_cm(|t| u.eval(&x, -t), black_box(&grid), 8, step))
    });
}

fn inversion(c: &mut Criterion) {
    let u = random_solution(1, 3, 2);
    let s_grid = uniform(0.0, 6.0, 121);
    let cfg = InversionConfig::default();
    c.bench_function("recover h on 121 points", |b| b.iter(|| recover_h(&u, black_box(&[0.2]), &s_grid, &cfg)));
}

fn caloric(c: &mut Criterion) {
    let u0 = MultiPoly::parse("x0^6*x1^2 - 3*x1^4*x2^3 + x2^8", Some(3)).expect("valid polynomial");
    c.bench_function("extend degree 8 in R^3", |b| b.iter(|| caloric_extend(black_box(&u0))));
    c.bench_function("exact null space n=2 degree 6", |b| b.iter(|| CaloricSystem::build(2, black_box(6), false).nullity()));
}

fn geometry(c: &mut Criterion) {
    let one = FnField::new(2, |_: &[f64], _: f64| 1.0);
    let lin = FnField::new(2, |x: &[f64], _: f64| x[0]);
    let quad = FnField::new(2, |x: &[f64], t: f64| x[0] * x[0] + 2.0 * t);
    let basis: [&dyn SpaceTimeField; 3] = [&one, &lin, &quad];
    let p = Paraboloid::centred(2, 1.0).expect("positive radius");
    c.bench_function("gram 3x3 on a paraboloid in R^2", |b| b.iter(|| gram(black_box(&basis), &p, QuadSpec::default())));
}

fn finite_differences(c: &mut Criterion) {
    let u0 = |x: &[f64]| (-x[0] * x[0]).exp();
    let spec = GridSpec::new(1, 4.0, 0.02);
    c.bench_function("explicit solve 1D h=0.02 to t=0.5", |b| b.iter(|| forward_solve(&u0, black_box(spec), 0.5)));
}

criterion_group!(benches, evaluation, inversion, caloric, geometry, finite_differences);
criterion_main!(benches);
