use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hasse_core::{
    decide_selectivity, derive_quadratic_constraints, enumerate_classes, theorem_consistency_sweep, EnumerationSpec,
};

fn decisions(c: &mut Criterion) {
    let (algebra, field, quadratic) = hasse_bench::fixture();
    let candidates = [quadratic];
    c.bench_function("decide_selectivity/fixture", |b| {
        b.iter(|| decide_selectivity(black_box(&algebra), black_box(&field), black_box(&candidates)).unwrap())
    });
    c.bench_function("derive_quadratic_constraints/fixture", |b| {
        b.iter(|| derive_quadratic_constraints(black_box(&algebra), black_box(&field)).unwrap())
    });
}

fn enumeration(c: &mut Criterion) {
    let spec = EnumerationSpec::with_degrees(6, 6);
    c.bench_function("enumerate_classes/6_places_degree_6", |b| {
        b.iter(|| enumerate_classes(black_box(&spec)).count())
    });
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let small = EnumerationSpec {
        finite: 2,
        ..EnumerationSpec::with_degrees(2, 6)
    };
    group.bench_function("degrees_2_to_6_5_places", |b| b.iter(|| theorem_consistency_sweep(black_box(&small))));
    group.finish();
}

criterion_group!(benches, decisions, enumeration);
criterion_main!(benches);
