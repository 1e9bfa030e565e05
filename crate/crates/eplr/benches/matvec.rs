//! Fast vs naive QMC matrix-vector product across point counts; the fast
//! path should scale like N log N against the naive N s t.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use eplr::cbc::cbc_fast;
use eplr::gf::build_field_table;
use eplr::matvec::{build_profile, fast_product, naive_product, RealMatrix};
use eplr::weights::{WeightModel, WeightSpec};

fn bench_products(c: &mut Criterion) {
    let s = 16usize;
    let t = 4usize;
    let gamma = WeightSpec::PowerLaw(-2.0).materialize(s).unwrap();
    let model = WeightModel::product(2, 2, gamma, 1.0).unwrap();
    let a = RealMatrix::from_fn(s, t, |i, j| ((3 * i + 5 * j) as f64).sin());

    let mut group = c.benchmark_group("matvec");
    group.sample_size(30);
    for m in [8u32, 10, 12, 14] {
        let rep = cbc_fast(2, m, s, &model).unwrap();
        let table = build_field_table(rep.rule.modulus()).unwrap();
        let profile = build_profile(&rep.rule, &table).unwrap();
        let n = rep.rule.n_points();
        group.bench_with_input(BenchmarkId::new("fast", n), &n, |b, _| {
            b.iter(|| black_box(fast_product(&profile, &a).unwrap()))
        });
        if m <= 12 {
            group.bench_with_input(BenchmarkId::new("naive", n), &n, |b, _| {
                b.iter(|| black_box(naive_product(&rep.rule, &table, &a).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_products);
criterion_main!(benches);
