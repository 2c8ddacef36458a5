use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use seqmix::schedules::angles_from_schedule;
use seqmix::sim::qaoa_state;
use seqmix::spectral::{adiabatic_timescale, uniform_grid, DEFAULT_LEVELS};
use seqmix::{verify_family, MixerMode, MixingFamily, QaoaSimulator, Schedule};
use seqmix_bench::{balanced_instance, warm_instance};

fn bench_qaoa_state(c: &mut Criterion) {
    let inst = warm_instance(3, 4);
    let fam = MixingFamily::mu_max(&inst, 3).unwrap();
    let mut group = c.benchmark_group("qaoa_state");
    for p in [8, 32] {
        let angles = angles_from_schedule(&Schedule::Simple { k: 3 }, p, 1.5).unwrap();
        for (label, mode) in [("seq", MixerMode::Sequential), ("sim", MixerMode::Simultaneous)] {
            group.bench_with_input(BenchmarkId::new(label, p), &angles, |b, angles| {
                b.iter(|| qaoa_state(&inst, &fam, black_box(angles), mode).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_family_max(c: &mut Criterion) {
    let mut group = c.benchmark_group("family_max");
    for per_value in [2, 3, 4] {
        let inst = balanced_instance(3, per_value);
        group.bench_with_input(BenchmarkId::from_parameter(inst.n()), &inst, |b, inst| {
            b.iter(|| MixingFamily::max(black_box(inst)))
        });
    }
    group.finish();
}

fn bench_verify_family(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_family");
    group.sample_size(20);
    for per_value in [2, 3] {
        let inst = balanced_instance(3, per_value);
        let fam = MixingFamily::max(&inst);
        group.bench_with_input(BenchmarkId::from_parameter(inst.n()), &fam, |b, fam| {
            b.iter(|| verify_family(&inst, black_box(fam)).unwrap())
        });
    }
    group.finish();
}

fn bench_timescale(c: &mut Criterion) {
    let inst = warm_instance(3, 3);
    let sim = QaoaSimulator::new(&inst, &MixingFamily::min(&inst)).unwrap();
    let grid = uniform_grid(0.05, 0.95, 19);
    let mut group = c.benchmark_group("adiabatic_timescale");
    group.sample_size(10);
    group.bench_function("min/simple", |b| {
        b.iter(|| adiabatic_timescale(sim.hamiltonians(), &Schedule::Simple { k: 3 }, &grid, DEFAULT_LEVELS).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_qaoa_state,
    bench_family_max,
    bench_verify_family,
    bench_timescale
);
criterion_main!(benches);
