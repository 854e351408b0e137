use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use treesec::{
    compute_spectrum, discreteness_obstruction, families, secular_polynomial, singular_components,
    SpectrumOptions,
};
use treesec_bench::{lengths, star_relations, trees};

fn secular(c: &mut Criterion) {
    let mut group = c.benchmark_group("secular_polynomial");
    for (name, g) in trees() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &g, |b, g| {
            b.iter(|| secular_polynomial(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn strata(c: &mut Criterion) {
    let mut group = c.benchmark_group("singular_components");
    group.sample_size(20);
    for (name, g) in trees() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &g, |b, g| {
            b.iter(|| singular_components(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_spectrum");
    group.sample_size(10);
    let opts = SpectrumOptions {
        adaptive: true,
        ..Default::default()
    };
    for (name, g) in trees() {
        let l = lengths(g.n_edges());
        group.bench_with_input(BenchmarkId::new(name, "kmax=50"), &g, |b, g| {
            b.iter(|| compute_spectrum(black_box(g), &l, 50.0, &opts).unwrap())
        });
    }
    group.finish();
}

fn obstruction(c: &mut Criterion) {
    let mut group = c.benchmark_group("discreteness_obstruction");
    group.sample_size(20);
    for n in [4, 6, 8] {
        let g = families::star(n);
        let rel = star_relations(n);
        group.bench_with_input(BenchmarkId::new("star", n), &(g, rel), |b, (g, rel)| {
            b.iter(|| discreteness_obstruction(black_box(g), rel).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, secular, strata, spectrum, obstruction);
criterion_main!(benches);
