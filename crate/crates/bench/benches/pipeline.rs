use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use teleport_core::channels::{oracle_density, ChannelKind, ChannelRealization, DensityForm};
use teleport_core::experiments::{sweep, BranchSelection, RGrid, SweepConfig};
use teleport_core::protocol::{
    enumerate_branches, run_branch, BellOutcome, CharlieOutcome, InfoQubit,
};
use teleport_core::rindler::{AccelerationParam, RegisterAcceleration};

fn acc(r: f64) -> RegisterAcceleration {
    RegisterAcceleration::uniform(3, AccelerationParam::new(r).unwrap())
}

fn bench_channels(c: &mut Criterion) {
    let a = acc(0.4);
    let mut group = c.benchmark_group("oracle_density");
    for kind in ChannelKind::ALL {
        group.bench_function(kind.tag(), |b| {
            b.iter(|| oracle_density(black_box(kind), &a).unwrap())
        });
    }
    group.finish();
}

fn bench_protocol(c: &mut Criterion) {
    let channel = ChannelRealization::new(ChannelKind::W, acc(0.5)).unwrap();
    let info = InfoQubit::from_alpha_sq(0.5, Some(AccelerationParam::new(0.3).unwrap())).unwrap();
    c.bench_function("run_branch/w", |b| {
        b.iter(|| {
            run_branch(
                &channel,
                black_box(&info),
                BellOutcome::PsiPlus,
                CharlieOutcome::Z0,
                DensityForm::Oracle,
            )
            .unwrap()
        })
    });
    c.bench_function("enumerate_branches/w", |b| {
        b.iter(|| enumerate_branches(&channel, black_box(&info), DensityForm::Oracle).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    let config = SweepConfig {
        grid: RGrid::new(0.0, 0.78, 0.06).unwrap(),
        branches: BranchSelection::AllBranches,
        ..SweepConfig::default()
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("all_branches_14pt", |b| {
        b.iter(|| sweep(black_box(&config)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_channels, bench_protocol, bench_sweep);
criterion_main!(benches);
