use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use secgame_core::multistage::{solve_pbne, SolverOptions};
use secgame_core::scenarios::{build_apt_game, build_exercise_qb, build_static_bayesian, exercise_qb_matrix};
use secgame_core::signaling::{solve_mixed_pbne, solve_pure_pbne, SignalingGame, DEFAULT_GRID};
use secgame_core::simulate::{monte_carlo_value, Noise};
use secgame_core::{mixed_ne, solve_bne, BimatrixGame, Information};

fn static_solvers(c: &mut Criterion) {
    let m = exercise_qb_matrix(0);
    c.bench_function("mixed_ne/exercise", |b| b.iter(|| mixed_ne(black_box(&m)).unwrap()));

    let j1: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| ((i * 7 + j * 3) % 11) as f64).collect()).collect();
    let j2: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| ((i * 5 + j * 9) % 13) as f64).collect()).collect();
    let big = BimatrixGame::new(j1, j2).unwrap();
    c.bench_function("mixed_ne/5x5", |b| b.iter(|| mixed_ne(black_box(&big)).unwrap()));

    let qb = build_exercise_qb(Information::Private);
    c.bench_function("solve_bne/exercise", |b| b.iter(|| solve_bne(black_box(&qb)).unwrap()));
}

fn signaling(c: &mut Criterion) {
    let g = SignalingGame::from_static(&build_static_bayesian(1.0, 3.0, 2.0).unwrap()).unwrap();
    c.bench_function("signaling/pure", |b| b.iter(|| solve_pure_pbne(black_box(&g), DEFAULT_GRID).unwrap()));
    c.bench_function("signaling/mixed", |b| b.iter(|| solve_mixed_pbne(black_box(&g)).unwrap()));
}

fn multistage(c: &mut Criterion) {
    let g = build_apt_game(&Default::default()).unwrap();
    let opts = SolverOptions::default();
    let mut group = c.benchmark_group("apt");
    group.sample_size(10);
    group.bench_function("solve_pbne", |b| b.iter(|| solve_pbne(black_box(&g), &opts).unwrap()));
    let sol = solve_pbne(&g, &opts).unwrap();
    let profile = match sol.solution() {
        Some(s) => s.profile.clone(),
        None => return,
    };
    group.bench_function("monte_carlo/1e4", |b| {
        b.iter(|| monte_carlo_value(black_box(&g), &profile, 10_000, 0, Noise::None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, static_solvers, signaling, multistage);
criterion_main!(benches);
