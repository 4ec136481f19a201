use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gtschr::{
    canonical_form, check_confluence, check_op_equivalence_gts, encode_graph, encode_gts, normal_forms_chr,
    normal_forms_gts_tracked, ConfluenceConfig, EncodeMode, EncoderOptions, GlobalsPolicy, Limits, OpEqConfig,
};
use gtschr_bench::{cycle, fixture};

fn canonical(c: &mut Criterion) {
    let p = fixture("cyclic-list");
    let mut group = c.benchmark_group("canonical_form");
    for n in [4, 8, 16] {
        let (g, _) = cycle(&p, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| canonical_form(g, &BTreeMap::new())));
    }
    group.finish();
}

fn normal_forms(c: &mut Criterion) {
    let p = fixture("cyclic-list");
    let opts = EncoderOptions::default();
    let program = encode_gts(&p.gts, &opts).unwrap();
    let mut group = c.benchmark_group("normal_forms");
    group.sample_size(20);
    for n in [3, 4, 5] {
        let (g, strong) = cycle(&p, n);
        let state = encode_graph(&g, EncodeMode::Ground, &strong, &GlobalsPolicy::AllVars, &opts).unwrap();
        group.bench_with_input(BenchmarkId::new("gts", n), &n, |b, _| {
            b.iter(|| normal_forms_gts_tracked(&p.gts, &g, &strong, Limits::default()))
        });
        group.bench_with_input(BenchmarkId::new("chr", n), &n, |b, _| {
            b.iter(|| normal_forms_chr(&program, &state, Limits::default()))
        });
    }
    group.finish();
}

fn analyses(c: &mut Criterion) {
    let mut group = c.benchmark_group("analysis");
    group.sample_size(10);
    for name in ["remove-loop", "strong-join", "two-loops"] {
        let p = fixture(name);
        let program = encode_gts(&p.gts, &EncoderOptions::default()).unwrap();
        group.bench_function(BenchmarkId::new("confluence", name), |b| {
            b.iter(|| check_confluence(&program, p.type_graph(), &ConfluenceConfig::default()))
        });
    }
    let (s1, s2) = (fixture("opeq-redundancy"), fixture("opeq-redundancy-reduced"));
    group.bench_function("op_equivalence", |b| {
        b.iter(|| check_op_equivalence_gts(&s1.gts, &s2.gts, &EncoderOptions::default(), &OpEqConfig::default()))
    });
    group.finish();
}

criterion_group!(benches, canonical, normal_forms, analyses);
criterion_main!(benches);
