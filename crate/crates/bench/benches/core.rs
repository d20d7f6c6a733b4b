use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use hitting_core::cnf;
use hitting_core::encode::{self, EncodeOptions};
use hitting_core::factor;
use hitting_core::fixtures;
use hitting_core::genesis::{generate, FormulaClass, GenerationTask};
use hitting_core::hitting;
use hitting_core::iso;
use hitting_core::satgate::{self, Backend};

fn counting(c: &mut Criterion) {
    let f = fixtures::f_4_8_52();
    c.bench_function("count/closed-form F_4_8_52", |b| b.iter(|| hitting::count_models_hitting(black_box(&f), 4)));
    c.bench_function("count/enumeration F_4_8_52", |b| b.iter(|| cnf::count_models_bruteforce(black_box(&f))));
}

fn canonical(c: &mut Criterion) {
    let f = fixtures::f_4_8_52();
    c.bench_function("iso/canonical_key F_4_8_52", |b| b.iter(|| iso::canonical_key(black_box(&f))));
    let mu = fixtures::mu_two(7);
    c.bench_function("iso/automorphisms MUtwo(7)", |b| b.iter(|| iso::automorphisms(black_box(&mu))));
}

fn factors(c: &mut Criterion) {
    let f = fixtures::f_4_8_52();
    c.bench_function("factor/is_irreducible F_4_8_52", |b| b.iter(|| factor::is_irreducible(black_box(&f))));
    c.bench_function("factor/is_strongly_irreducible F_4_8_52", |b| b.iter(|| factor::is_strongly_irreducible(black_box(&f))));
}

fn generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    group.sample_size(10);
    for (n, m, class) in [(4, 8, FormulaClass::Ruh), (5, 9, FormulaClass::Iuh)] {
        let task = GenerationTask::new(n, m, class);
        group.bench_function(format!("{class}({n},{m})"), |b| b.iter(|| generate(black_box(&task))));
    }
    group.finish();
}

fn solving(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode+solve");
    group.sample_size(10);
    let f = fixtures::mu_two(5);
    for (label, options) in [
        ("plain", EncodeOptions::default()),
        ("reuse+symmetry+ordering", EncodeOptions { reuse: true, symmetry: true, ordering: true, ..EncodeOptions::default() }),
    ] {
        group.bench_function(format!("MUtwo(5) s=9 {label}"), |b| {
            b.iter(|| {
                let e = encode::encode(&f, 9, options).unwrap();
                satgate::solve(&e.cnf, &Backend::Builtin, None).unwrap().status
            })
        });
    }
    group.finish();
}

criterion_group!(benches, counting, canonical, factors, generation, solving);
criterion_main!(benches);
