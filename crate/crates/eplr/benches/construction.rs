//! Construction benchmarks: fast vs slow CBC, FFT vs direct convolution,
//! and the data-parallel kernels. Run once with the default features and
//! once with `--no-default-features` to compare the rayon and sequential
//! paths of the grid/point/criterion loops.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use eplr::cbc::{cbc_fast, cbc_slow, criterion_pointwise};
use eplr::fft::{circular_convolve, direct_convolve, CirculantConvolver};
use eplr::kernel::w_alpha_grid;
use eplr::points::generate_points;
use eplr::quadrature::{builtin_integrand, qmc_mean, IntegrandParams};
use eplr::weights::{WeightModel, WeightSpec};

fn model(s: usize, alpha: u32) -> WeightModel {
    let gamma = WeightSpec::PowerLaw(-2.0).materialize(s).unwrap();
    WeightModel::product(2, alpha, gamma, 1.0).unwrap()
}

fn bench_cbc(c: &mut Criterion) {
    let mut group = c.benchmark_group("cbc");
    let md = model(4, 2);
    group.bench_function("slow_m6_s4", |b| {
        b.iter(|| black_box(cbc_slow(2, 6, 4, &md).unwrap().criterion))
    });
    group.bench_function("fast_m6_s4", |b| {
        b.iter(|| black_box(cbc_fast(2, 6, 4, &md).unwrap().criterion))
    });
    let md10 = model(10, 2);
    for m in [8u32, 10, 12] {
        group.bench_with_input(BenchmarkId::new("fast_s10", m), &m, |b, &m| {
            b.iter(|| black_box(cbc_fast(2, m, 10, &md10).unwrap().criterion))
        });
    }
    group.finish();
}

fn bench_convolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolve");
    for m in [8u32, 10, 12] {
        let l = (1usize << m) - 1;
        let col: Vec<f64> = (0..l).map(|i| ((i * 37) as f64).sin()).collect();
        let v: Vec<f64> = (0..l).map(|i| ((i * 11) as f64).cos()).collect();
        group.bench_with_input(BenchmarkId::new("fft", l), &l, |b, _| {
            b.iter(|| black_box(circular_convolve(&col, &v)))
        });
        let conv = CirculantConvolver::new(&col);
        group.bench_with_input(BenchmarkId::new("fft_planned", l), &l, |b, _| {
            b.iter(|| black_box(conv.apply(&v)))
        });
        if l <= 4100 {
            group.bench_with_input(BenchmarkId::new("direct", l), &l, |b, _| {
                b.iter(|| black_box(direct_convolve(&col, &v)))
            });
        }
    }
    group.finish();
}

fn bench_parallel_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("data_parallel");
    group.sample_size(20);
    group.bench_function("w_grid_m14", |b| b.iter(|| black_box(w_alpha_grid(14, 2, 2))));

    let md = model(8, 2);
    let rule = cbc_fast(2, 13, 8, &md).unwrap().rule;
    group.bench_function("points_m13_s8", |b| b.iter(|| black_box(generate_points(&rule))));

    let gamma = WeightSpec::PowerLaw(-2.0).materialize(8).unwrap();
    let f = builtin_integrand("f1", 8, &gamma, &IntegrandParams::default()).unwrap();
    let pts = generate_points(&rule);
    group.bench_function("qmc_mean_m13_s8", |b| b.iter(|| black_box(qmc_mean(&f, &pts).unwrap())));

    group.bench_function("criterion_pointwise_m12_s8", |b| {
        let rule12 = cbc_fast(2, 12, 8, &md).unwrap().rule;
        b.iter(|| black_box(criterion_pointwise(&rule12, &md, 1e-12).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_cbc, bench_convolve, bench_parallel_kernels);
criterion_main!(benches);
