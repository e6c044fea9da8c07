//! Throughput benches: the data-parallel batch runner against its sequential
//! counterpart, plus the two hot kernels inside the loop (controller
//! evaluation and membership computation).
//!
//! `cargo bench` uses the default `parallel` feature, so `batch/parallel`
//! exercises the rayon path; with `--no-default-features` both batch benches
//! measure the sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::Vector2;

use windloop::aero::AeroModel;
use windloop::blending::{CouplingFilter, MultiRegionController, TorquePremise};
use windloop::config::{ResolvedScenario, ScenarioConfig};
use windloop::controllers::{design_default_controllers, DesignConfig};
use windloop::sim::{run_batch, run_batch_sequential, run_scenario};
use windloop::turbine::TurbineParams;

fn scenario_set() -> Vec<ResolvedScenario> {
    let mut tomls = vec![
        "[scenario]\nname = \"steady-8\"\nduration = 10.0\n\
         [wind]\nprofile = \"constant\"\nspeed = 8.0\n"
            .to_string(),
        "[scenario]\nname = \"steady-16\"\nduration = 10.0\n\
         [wind]\nprofile = \"constant\"\nspeed = 16.0\n"
            .to_string(),
        "[scenario]\nname = \"gust\"\nduration = 10.0\n\
         [wind]\nprofile = \"gust\"\nbase = 11.0\namplitude = 3.0\nperiod = 30.0\n"
            .to_string(),
    ];
    for seed in 0..5u64 {
        tomls.push(format!(
            "[scenario]\nname = \"turb-{seed}\"\nduration = 10.0\n\
             [wind]\nprofile = \"turbulent\"\nmean = 11.0\nintensity = 0.1\nseed = {seed}\n"
        ));
    }
    tomls
        .iter()
        .map(|t| {
            ScenarioConfig::from_toml_str(t)
                .expect("bench scenario parses")
                .resolve()
                .expect("bench scenario resolves")
        })
        .collect()
}

fn bench_batch(c: &mut Criterion) {
    let scenarios = scenario_set();
    let mut group = c.benchmark_group("batch");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let results = run_batch_sequential(black_box(&scenarios));
            assert!(results.iter().all(|(_, r)| r.is_ok()));
            results
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let results = run_batch(black_box(&scenarios));
            assert!(results.iter().all(|(_, r)| r.is_ok()));
            results
        })
    });
    group.finish();
}

fn bench_single_scenario(c: &mut Criterion) {
    let rs = ScenarioConfig::from_toml_str(
        "[scenario]\nname = \"turb\"\nduration = 10.0\n\
         [wind]\nprofile = \"turbulent\"\nmean = 11.0\nintensity = 0.1\nseed = 3\n",
    )
    .unwrap()
    .resolve()
    .unwrap();
    c.bench_function("scenario_10s", |b| {
        b.iter(|| run_scenario(black_box(&rs)).unwrap())
    });
}

fn bench_kernels(c: &mut Criterion) {
    let p = TurbineParams::default();
    let aero = AeroModel::empirical(p.lambda_opt, p.cp_max).unwrap();
    let (partial, full) = design_default_controllers(&p, &aero, &DesignConfig::default()).unwrap();
    let filter = CouplingFilter::new(&p, 0.12, 0.18).unwrap();
    let ctrl = MultiRegionController {
        partial,
        full,
        filter: filter.clone(),
        premise: TorquePremise::Command,
    };

    c.bench_function("controller_eval", |b| {
        let dx = Vector2::new(0.05, 0.02);
        b.iter(|| {
            ctrl.control(
                black_box(&dx),
                black_box(1.5),
                black_box(1.2),
                black_box(0.02),
                black_box(11.0),
                0.0,
            )
            .unwrap()
        })
    });

    c.bench_function("memberships_1k", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for k in 0..1000 {
                let omega = 1.0 + 0.0004 * k as f64;
                let torque = 4000.0 + 37.0 * k as f64;
                let h = filter
                    .memberships(black_box(omega), black_box(torque))
                    .unwrap();
                acc += h[0] + h[3];
            }
            acc
        })
    });
}

criterion_group!(benches, bench_batch, bench_single_scenario, bench_kernels);
criterion_main!(benches);
