use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use orthlab_core::arithbase::{sieve_primes, Discriminant};
use orthlab_core::gaussorth::orth_map;
use orthlab_core::heckeseries::eta_product;
use orthlab_core::heckeseries::EigenSource;
use orthlab_core::momentlab::mollifier::{MollifierBlock, MollifierKind};
use orthlab_core::primechar::split_ratio_with;
use orthlab_core::qfclass::class_group;
use orthlab_core::ternary::TernaryQF;

fn benches(c: &mut Criterion) {
    let d3080 = Discriminant::from_big_d(3080).unwrap();
    c.bench_function("class_group 3080", |b| {
        b.iter(|| class_group(black_box(&d3080)).unwrap())
    });
    c.bench_function("orth_map 770", |b| {
        b.iter(|| orth_map(black_box(770), &TernaryQF::f1()).unwrap())
    });
    c.bench_function("eta_product level2 10k", |b| {
        b.iter(|| eta_product(&[(1, 8), (2, 8)], black_box(10_000)).unwrap())
    });
    let table = sieve_primes(1_000_000).unwrap();
    c.bench_function("split_ratio X=1000", |b| {
        b.iter(|| split_ratio_with(&table, &d3080, black_box(1000)).unwrap())
    });
    let g = class_group(&d3080).unwrap();
    let (s1, s2) = (
        EigenSource::level2(100).unwrap(),
        EigenSource::level5(100).unwrap(),
    );
    c.bench_function("mollifier identity l=4", |b| {
        b.iter(|| {
            let m = MollifierBlock::new(MollifierKind::Paired(&s1, &s2), &g, &[13, 19], None, 4)
                .unwrap();
            m.identity_check(1)
        })
    });
}

criterion_group!(core, benches);
criterion_main!(core);
