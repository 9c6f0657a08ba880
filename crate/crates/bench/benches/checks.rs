use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use phimod_core::{
    are_isomorphic, build_monodromy, check_weak_admissibility, normalize, oracle_isomorphic, oracle_weak_admissibility,
};

const SIZES: [usize; 3] = [1, 4, 16];

fn admissibility(c: &mut Criterion) {
    let mut g = c.benchmark_group("weak_admissibility");
    for f in SIZES {
        let m = phimod_bench::module(f);
        g.bench_with_input(BenchmarkId::new("closed_form", f), &m, |b, m| b.iter(|| check_weak_admissibility(m)));
        g.bench_with_input(BenchmarkId::new("oracle", f), &m, |b, m| b.iter(|| oracle_weak_admissibility(m)));
    }
    g.finish();
}

fn isomorphism(c: &mut Criterion) {
    let mut g = c.benchmark_group("isomorphism");
    for f in SIZES {
        let (m1, m2) = phimod_bench::pair(f);
        g.bench_with_input(BenchmarkId::new("closed_form", f), &(&m1, &m2), |b, (x, y)| b.iter(|| are_isomorphic(x, y)));
        g.bench_with_input(BenchmarkId::new("oracle", f), &(&m1, &m2), |b, (x, y)| b.iter(|| oracle_isomorphic(x, y)));
    }
    g.finish();
}

fn normal_form(c: &mut Criterion) {
    let mut g = c.benchmark_group("normalize");
    for f in SIZES {
        let (fro, raw) = phimod_bench::raw(f);
        g.bench_with_input(BenchmarkId::from_parameter(f), &(fro, raw), |b, (fro, raw)| b.iter(|| normalize(fro, raw)));
    }
    g.finish();
}

fn monodromy(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_monodromy");
    for f in SIZES {
        let (fro, entries) = phimod_bench::monodromy(f);
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        g.bench_with_input(BenchmarkId::from_parameter(f), &(fro, entries), |b, (fro, e)| b.iter(|| build_monodromy(fro, e)));
    }
    g.finish();
}

criterion_group!(benches, admissibility, isomorphism, normal_form, monodromy);
criterion_main!(benches);
