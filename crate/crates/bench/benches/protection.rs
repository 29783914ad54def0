use std::collections::{BTreeMap, BTreeSet};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nps_core::fixtures;
use nps_core::gfield::FieldSpec;
use nps_core::npsim::{inject_node_failure, run_session, schedule_rounds, DataSource};
use nps_core::protcode::{decode, encode_round, verify_recoverability, Convention, ProtectionMatrix};

fn field_mul(c: &mut Criterion) {
    let mut g = c.benchmark_group("field_mul");
    for q in [8u32, 256, 65536] {
        let f = FieldSpec::of_order(q).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(q), &f, |b, f| {
            b.iter(|| {
                let mut acc = 1;
                for x in 1..1024u32 {
                    acc = f.add(f.mul(acc, x % q), 1);
                }
                black_box(acc)
            })
        });
    }
    g.finish();
}

fn recoverability(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_recoverability");
    for (n, t, q) in [(10, 3, 16), (12, 4, 16), (12, 4, 64)] {
        let f = FieldSpec::of_order(q).unwrap();
        let m = ProtectionMatrix::new(n, t, &f, Convention::Matrix).unwrap();
        g.bench_function(format!("n{n}_t{t}_q{q}"), |b| b.iter(|| black_box(verify_recoverability(&m))));
    }
    g.finish();
}

fn round_codec(c: &mut Criterion) {
    let (n, t) = (10, 3);
    let f = FieldSpec::of_order(16).unwrap();
    let m = ProtectionMatrix::new(n, t, &f, Convention::Matrix).unwrap();
    let plan = schedule_rounds(n, t).unwrap();
    let r = plan.round(1).unwrap();
    let sent: BTreeMap<_, _> = r.working.iter().map(|&i| (i, f.element(i as u32).unwrap())).collect();
    let lost: BTreeSet<usize> = r.working.iter().take(t).copied().collect();
    let plain: BTreeMap<_, _> = sent.iter().filter(|(i, _)| !lost.contains(i)).map(|(&i, x)| (i, x.clone())).collect();
    let coded: BTreeMap<_, _> = r.protection.iter().copied().zip(encode_round(&m, 1, &sent).unwrap()).collect();

    c.bench_function("encode_round_n10_t3", |b| b.iter(|| black_box(encode_round(&m, 1, &sent).unwrap())));
    c.bench_function("decode_n10_t3_lost3", |b| {
        b.iter(|| black_box(decode(&m, 1, &plain, &coded, &lost).unwrap()))
    });
}

fn session(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_session");
    for (n, t) in [(5, 2), (10, 3)] {
        let net = fixtures::every_subset(n, t);
        let f = FieldSpec::of_order(16).unwrap();
        let plan = schedule_rounds(n, t).unwrap();
        let m = ProtectionMatrix::new(n, t, &f, Convention::Matrix).unwrap();
        let node = if t == 2 { "g2_4" } else { "g1_5_9" };
        let s = inject_node_failure(&net, node, &plan).unwrap();
        g.bench_function(format!("n{n}_t{t}"), |b| {
            b.iter(|| black_box(run_session(&net, &plan, &m, Some(&s), &DataSource::Seeded(1)).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, field_mul, recoverability, round_codec, session);
criterion_main!(benches);
