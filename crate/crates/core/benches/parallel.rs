//! Sequential vs rayon execution over the four parallel entry points.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use modroot_core::braid::{Caps, RootEnumeration};
use modroot_core::cluster::enumerate_fan;
use modroot_core::oracle::OracleSession;
use modroot_core::stability::{oracle_domains, verify_stability_theorem};
use modroot_core::{EulerData, Exec, IntVector, ValuedQuiver};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn quiver(text: &str) -> (ValuedQuiver, EulerData) {
    let q = ValuedQuiver::from_json(text).unwrap();
    let ed = EulerData::new(&q).unwrap();
    (q, ed)
}

fn b3() -> (ValuedQuiver, EulerData) {
    quiver(include_str!("../fixtures/b3_real.json"))
}

/// `A_n` with a linear orientation, large enough for the fan to matter.
fn a_n(n: usize) -> (ValuedQuiver, EulerData) {
    let arrows: Vec<(usize, usize)> = (2..=n).map(|i| (i, i - 1)).collect();
    let q = ValuedQuiver::simply_laced(&format!("a{n}"), n, &arrows).unwrap();
    let ed = EulerData::new(&q).unwrap();
    (q, ed)
}

fn stability_box(c: &mut Criterion) {
    let (q, ed) = b3();
    let roots = RootEnumeration::run(&q, &ed, Caps::default(), Exec::Sequential).unwrap().set;
    let session = OracleSession::new(&q, 2, &roots, 0, Exec::Sequential).unwrap();
    let domains = oracle_domains(&session, Exec::Sequential).unwrap();
    let d = &domains[&IntVector(vec![1, 1, 1])];
    let mut g = c.benchmark_group("stability_box_r6");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| black_box(verify_stability_theorem(d, 6, exec))));
    }
    g.finish();
}

fn braid_bfs(c: &mut Criterion) {
    let mut g = c.benchmark_group("braid_bfs");
    for n in [4, 5] {
        let (q, ed) = a_n(n);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| black_box(RootEnumeration::run(&q, &ed, Caps::default(), exec).unwrap().set.len()))
            });
        }
    }
    g.finish();
}

fn fan_bfs(c: &mut Criterion) {
    let mut g = c.benchmark_group("fan_bfs");
    g.sample_size(20);
    for n in [4, 5] {
        let (_, ed) = a_n(n);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| black_box(enumerate_fan(&ed, 100_000, exec).unwrap().len()))
            });
        }
    }
    g.finish();
}

fn oracle_session(c: &mut Criterion) {
    let (q, ed) = b3();
    let roots = RootEnumeration::run(&q, &ed, Caps::default(), Exec::Sequential).unwrap().set;
    let mut g = c.benchmark_group("oracle_session_b3_q2");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                let s = OracleSession::new(&q, 2, &roots, 0, exec).unwrap();
                black_box(oracle_domains(&s, exec).unwrap().len())
            })
        });
    }
    g.finish();
}

criterion_group!(benches, stability_box, braid_bfs, fan_bfs, oracle_session);
criterion_main!(benches);
