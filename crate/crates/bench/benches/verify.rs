use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lieverify::catalog::{default_catalog, verify_catalog, verify_entry, VerifyConfig};
use lieverify::determine::{closed_form_residual, prolongation_residual};
use lieverify::liealg::{decompose_operator, structure_constants};
use lieverify::{normalize, parse_expr, SamplingDomain};
use lieverify_bench::golden_entries;

fn parsing(c: &mut Criterion) {
    let text = "-u^(-1)*ux^2 + (q+2)*x^(-1)*ux + q*u*ln(u)*x^(-2) + u*x^(-2)*G(ux*u^(-1)*x + q*ln(u))";
    c.bench_function("parse", |b| b.iter(|| parse_expr(black_box(text)).unwrap()));
    let e = parse_expr("((x + t)^3 - (x - t)^3)*(u + ux)^2").unwrap();
    c.bench_function("normalize", |b| b.iter(|| normalize(black_box(&e))));
}

fn oracles(c: &mut Criterion) {
    let entry = golden_entries().remove(2);
    let (gens, f) = entry.instantiate(&Default::default());
    let op = decompose_operator(&gens[2]).unwrap();
    c.bench_function("closed_form_residual", |b| b.iter(|| closed_form_residual(black_box(&op), &f).unwrap()));
    c.bench_function("prolongation_residual", |b| b.iter(|| prolongation_residual(black_box(&gens[2]), &f).unwrap()));
    c.bench_function("structure_constants", |b| {
        b.iter(|| structure_constants(black_box(&gens), &SamplingDomain::new(), 42).unwrap())
    });
}

fn entries(c: &mut Criterion) {
    let cfg = VerifyConfig::default();
    for e in golden_entries() {
        c.bench_function(&format!("verify_entry {}", e.id), |b| b.iter(|| verify_entry(black_box(&e), &cfg)));
    }
    let cat = default_catalog();
    let mut g = c.benchmark_group("catalog");
    g.sample_size(10);
    g.bench_function("verify_catalog", |b| b.iter(|| verify_catalog(black_box(&cat.entries), &cfg)));
    g.finish();
}

criterion_group!(benches, parsing, oracles, entries);
criterion_main!(benches);
