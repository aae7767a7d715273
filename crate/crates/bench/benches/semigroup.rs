use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dampspec::generator::portrait;
use dampspec::modal::{trajectory, ModalState, PsiScan};
use dampspec::resolvent::{lambda_grid, ResolventScan};
use dampspec::spectrum::{log_grid, SamplingPolicy};
use dampspec::stability::classify;
use dampspec_bench::{kelvin_voigt, rotational, slow_wave};

fn bench_portrait(c: &mut Criterion) {
    let m = kelvin_voigt();
    let mut g = c.benchmark_group("portrait");
    for budget in [100usize, 1000, 10_000] {
        g.bench_with_input(BenchmarkId::from_parameter(budget), &budget, |b, &n| {
            b.iter(|| portrait(&m.damping, &m.spectrum, n, &SamplingPolicy::default()).unwrap())
        });
    }
    g.finish();
}

fn bench_psi(c: &mut Criterion) {
    let m = slow_wave();
    let times = log_grid(10.0, 1e3, 60);
    let scan = PsiScan::new(&m.damping, &m.spectrum, 1000, &SamplingPolicy::default()).unwrap();
    c.bench_function("psi_profile_1000_modes", |b| b.iter(|| scan.profile(black_box(&times))));
}

fn bench_resolvent(c: &mut Criterion) {
    let m = slow_wave();
    let scan = ResolventScan::new(&m.damping, &m.spectrum, 1000, &SamplingPolicy::default()).unwrap();
    let grid = lambda_grid(&scan, 10.0, 1e3, 200);
    c.bench_function("resolvent_profile_1000_modes", |b| {
        b.iter(|| scan.profile(black_box(&grid)).unwrap())
    });
}

fn bench_trajectory(c: &mut Criterion) {
    let m = kelvin_voigt();
    let z = ModalState::random(&m.damping, &m.spectrum, 1000, &SamplingPolicy::default(), 1).unwrap();
    let times: Vec<f64> = (0..100).map(|k| 0.1 * f64::from(k)).collect();
    c.bench_function("trajectory_1000_modes", |b| {
        b.iter(|| trajectory(&z, black_box(&times), None))
    });
}

fn bench_classify(c: &mut Criterion) {
    let m = rotational();
    c.bench_function("classify_beam_rot", |b| {
        b.iter(|| classify(black_box(&m.damping), &m.spectrum))
    });
}

criterion_group!(
    benches,
    bench_portrait,
    bench_psi,
    bench_resolvent,
    bench_trajectory,
    bench_classify
);
criterion_main!(benches);
