use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use tonestack_bench::{control_lattice, default_grid, default_system, COMPONENTS};
use tonestack_core::oracle::nodal_response;
use tonestack_core::{
    frequency_response, solve_cramer3, solve_elimination, AnalysisOptions, ControlSettings,
};

fn bench_single_solve(c: &mut Criterion) {
    let system = default_system(1000.0);
    let mut group = c.benchmark_group("solve_3x3");
    group.bench_function("elimination", |b| {
        b.iter(|| solve_elimination(black_box(&system.z), black_box(&system.v)))
    });
    group.bench_function("cramer", |b| {
        b.iter(|| solve_cramer3(black_box(&system.z), black_box(&system.v)))
    });
    group.bench_function("nodal_oracle", |b| {
        b.iter(|| {
            nodal_response(
                &COMPONENTS,
                black_box(&ControlSettings::DEFAULT),
                black_box(1000.0),
                1.0,
            )
        })
    });
    group.finish();
}

fn bench_response(c: &mut Criterion) {
    let grid = default_grid();
    let mut group = c.benchmark_group("frequency_response");
    for (name, options) in [
        ("physical", AnalysisOptions::default()),
        ("script_compat", AnalysisOptions::SCRIPT_COMPAT),
    ] {
        group.throughput(Throughput::Elements(grid.len() as u64));
        group.bench_with_input(
            BenchmarkId::new(name, grid.len()),
            &options,
            |b, options| {
                b.iter(|| {
                    frequency_response(&COMPONENTS, &ControlSettings::DEFAULT, &grid, 5.0, options)
                })
            },
        );
    }
    group.finish();
}

fn bench_full_grid(c: &mut Criterion) {
    let grid = default_grid();
    let settings = control_lattice(11);
    let options = AnalysisOptions::default();
    let mut group = c.benchmark_group("control_grid");
    group.sample_size(10);
    group.throughput(Throughput::Elements((settings.len() * grid.len()) as u64));
    group.bench_function("11^3 x 50", |b| {
        b.iter(|| {
            for s in &settings {
                black_box(frequency_response(&COMPONENTS, s, &grid, 5.0, &options).unwrap());
            }
        })
    });
    group.finish();
}

criterion_group!(benches, bench_single_solve, bench_response, bench_full_grid);
criterion_main!(benches);
