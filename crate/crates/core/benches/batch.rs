use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orthoglide_balance::batch;
use orthoglide_balance::geometry::{GeometryParams, PlatformPose};
use orthoglide_balance::mass_model::MassParams;
use orthoglide_balance::par::Execution;
use orthoglide_balance::planner::{PlanMode, PlanRequest};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn pose_sweeps(c: &mut Criterion) {
    let g = GeometryParams::prototype();
    let mp = MassParams::prototype();
    let poses = batch::sample_poses(4096, 11, &g, 0.01);
    let offsets = batch::sample_offsets(4096, 12, 1e-3);

    let mut group = c.benchmark_group("pose_sweeps");
    for (name, exec) in MODES {
        group.bench_with_input(
            BenchmarkId::new("fk_round_trip", name),
            &exec,
            |b, &exec| b.iter(|| batch::round_trip_errors(black_box(&poses), &offsets, &g, exec)),
        );
        group.bench_with_input(
            BenchmarkId::new("com_self_inversion", name),
            &exec,
            |b, &exec| b.iter(|| batch::self_inversion(black_box(&poses), &offsets, &g, &mp, exec)),
        );
        group.bench_with_input(BenchmarkId::new("com_routes", name), &exec, |b, &exec| {
            b.iter(|| batch::com_route_spread(black_box(&poses), &g, &mp, exec))
        });
    }
    group.finish();
}

fn planning(c: &mut Criterion) {
    let g = GeometryParams::prototype();
    let targets = batch::sample_poses(16, 21, &g, 0.3);
    let requests: Vec<PlanRequest> = targets
        .iter()
        .enumerate()
        .map(|(i, end)| PlanRequest {
            end: *end,
            start: PlatformPose::origin(),
            ..PlanRequest::prototype(PlanMode::ALL[i % 2])
        })
        .collect();
    let base = PlanRequest::prototype(PlanMode::ComLineBangbang);
    let steps = [1e-3, 5e-4, 2.5e-4, 1.25e-4];

    let mut group = c.benchmark_group("planning");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("plan_many", name), &exec, |b, &exec| {
            b.iter(|| batch::plan_many(black_box(&requests), exec))
        });
        group.bench_with_input(BenchmarkId::new("dt_sweep", name), &exec, |b, &exec| {
            b.iter(|| batch::peak_force_sweep(black_box(&base), &steps, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, pose_sweeps, planning);
criterion_main!(benches);
