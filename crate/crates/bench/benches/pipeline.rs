use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tmcf::approx::{ftmm_value, tau_tm, Engine};
use tmcf::canonical::{BetaTable, CanonicalSeq};
use tmcf::cfseries::extract_cf;
use tmcf::laurent::LaurentTail;
use tmcf::numtheory::{dlog2, tower_mod, PrimePower};
use tmcf::poly::Int;
use tmcf::realcf::real_cf;
use tmcf_bench::TOWER_STEPS;

fn bench_beta_table(c: &mut Criterion) {
    c.bench_function("beta_table_fill_200", |b| {
        b.iter(|| {
            let table = BetaTable::new();
            black_box(table.beta(200))
        })
    });
}

fn bench_canonical(c: &mut Criterion) {
    c.bench_function("canonical_convergent_60", |b| {
        b.iter(|| {
            let seq = CanonicalSeq::new();
            black_box(seq.canonical(60).qhat)
        })
    });
}

fn bench_stream_engine(c: &mut Criterion) {
    c.bench_function("extract_cf_16", |b| {
        b.iter(|| {
            let tail = LaurentTail::thue_morse();
            black_box(extract_cf(&tail, 16).unwrap().verified_count)
        })
    });
}

fn bench_tilde_pair(c: &mut Criterion) {
    let mut group = c.benchmark_group("tilde_pair_doubly_exponential");
    let engine = Engine::new();
    for n in TOWER_STEPS {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| black_box(engine.tilde_pair(n, 9, 2).unwrap().q_int.bits()))
        });
    }
    group.finish();
}

fn bench_modular(c: &mut Criterion) {
    let pp = PrimePower::from_u64(3, 10).unwrap();
    c.bench_function("tower_mod_3_10", |b| {
        b.iter(|| black_box(tower_mod(&Int::from(2), 19683, &pp).unwrap()))
    });
    let x = tower_mod(&Int::from(2), 1234, &pp).unwrap();
    c.bench_function("dlog2_mod_3_10", |b| {
        b.iter(|| black_box(dlog2(&x, &pp).unwrap()))
    });
}

fn bench_intervals(c: &mut Criterion) {
    c.bench_function("ftmm_value_2_at_8192", |b| {
        b.iter(|| black_box(ftmm_value(2, 8192).0))
    });
    let tau = tau_tm(8192);
    c.bench_function("real_cf_tau_400_terms", |b| {
        b.iter(|| black_box(real_cf(&tau, 400).quotients.len()))
    });
}

criterion_group!(
    benches,
    bench_beta_table,
    bench_canonical,
    bench_stream_engine,
    bench_tilde_pair,
    bench_modular,
    bench_intervals
);
criterion_main!(benches);
