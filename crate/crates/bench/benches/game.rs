use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use towgame_bench::{interval_grid, params_for};
use towgame_core::field::ValueField;
use towgame_core::game::{
    estimate_value, stopping_time_stats, Extremum, GameRandomness, GreedyStrategy, TrajectoryRng,
    ZeroStrategy,
};
use towgame_core::geometry::DomainShape;
use towgame_core::solver::{solve_dpp, SolveOptions};

fn bench_unit_ball_sampler(c: &mut Criterion) {
    let mut group = c.benchmark_group("unit_ball_sampler");
    for dim in [1usize, 2, 3] {
        group.bench_function(format!("dim{dim}"), |b| {
            let mut rng = TrajectoryRng::for_sample(1, 0);
            let mut w = vec![0.0; dim];
            b.iter(|| {
                rng.unit_ball(&mut w);
                black_box(w[0])
            })
        });
    }
    group.finish();
}

fn bench_greedy_rollouts(c: &mut Criterion) {
    let grid = interval_grid(0.1, 8);
    let params = params_for(&grid, 3.0, 0.25);
    let shape = DomainShape::Interval { a: -1.0, b: 1.0 };
    let boundary = ValueField::from_boundary_fn(grid.clone(), |_| 1.0).unwrap();
    let (u, _) = solve_dpp(grid, &params, &boundary, SolveOptions::default()).unwrap();
    let u = Arc::new(u);
    let maxer = GreedyStrategy::new(u.clone(), Extremum::Maximize, 0.01);
    let miner = GreedyStrategy::new(u, Extremum::Minimize, 0.01);
    let one = |_: &[f64]| 1.0;
    c.bench_function("estimate_value/figure1_256_samples", |b| {
        b.iter(|| {
            estimate_value(
                &[0.0],
                &maxer,
                &miner,
                &params,
                &shape,
                &one,
                256,
                7,
                100_000,
            )
            .unwrap()
        })
    });
}

fn bench_confined_exit(c: &mut Criterion) {
    let params = towgame_core::params::GameParams::new(6.0, 2, 0.0, 0.1).unwrap();
    c.bench_function("stopping_time/annulus_64_samples", |b| {
        b.iter(|| {
            stopping_time_stats(
                &[0.8, 0.0],
                &[0.0, 0.0],
                0.3,
                2.0,
                &ZeroStrategy,
                &params,
                64,
                3,
                1_000_000,
            )
            .unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_unit_ball_sampler,
    bench_greedy_rollouts,
    bench_confined_exit
);
criterion_main!(benches);
