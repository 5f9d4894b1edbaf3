use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use limitrank_bench::{random_matrix, sweep_corpus};
use limitrank_core::abelian::smith_normal_form;
use limitrank_core::fixtures;
use limitrank_core::{enumerate_index_p_kernels, subgroup_presentation, verify_theorem_a};

fn snf(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    for n in [8usize, 16, 32] {
        let m = random_matrix(n as u64, n, n, 9);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| smith_normal_form(black_box(m)))
        });
    }
    group.finish();
}

fn reidemeister_schreier(c: &mut Criterion) {
    let double = fixtures::double();
    let g = double.presentation();
    let mut group = c.benchmark_group("subgroup_presentation");
    for p in [2u64, 3, 5, 7] {
        let h = enumerate_index_p_kernels(g, p).unwrap().remove(0);
        group.bench_with_input(BenchmarkId::new("double", p), &h, |b, h| {
            b.iter(|| subgroup_presentation(black_box(g), h).unwrap())
        });
    }
    group.finish();
}

fn theorem_sweep(c: &mut Criterion) {
    let double = fixtures::double();
    c.bench_function("verify double p=3", |b| {
        b.iter(|| verify_theorem_a(black_box(&double), 3).unwrap())
    });
    let corpus = sweep_corpus(11, 20);
    c.bench_function("verify corpus20 p=2", |b| {
        b.iter(|| {
            for e in &corpus {
                black_box(verify_theorem_a(e, 2).unwrap());
            }
        })
    });
}

criterion_group!(benches, snf, reidemeister_schreier, theorem_sweep);
criterion_main!(benches);
