//! Acceptance run: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use modroot_core::braid::{Caps, RootEnumeration, RootSet};
use modroot_core::cluster::rank2::{consecutive_formula_check, rank2_sequences, Obj, Rank2State};
use modroot_core::cluster::reduced::{beta_bar, conjugation_commutes, z_beta};
use modroot_core::cluster::{enumerate_fan, gamma_of, initial_state, verify_cvector_theorem, Fan};
use modroot_core::harness::{oracle_suite, run_verify_all, VerifyOptions};
use modroot_core::io::{load_quiver, Cache};
use modroot_core::oracle::OracleSession;
use modroot_core::picture::build_model;
use modroot_core::stability::{oracle_domains, verify_stability_theorem, StabilityDomain};
use modroot_core::{EulerData, Exec, IntMatrix, IntVector, ValuedQuiver};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> (ValuedQuiver, EulerData) {
    let q = load_quiver(fixture(name)).expect("fixture loads");
    let ed = EulerData::new(&q).expect("euler data");
    (q, ed)
}

fn v(x: &[i64]) -> IntVector {
    IntVector(x.to_vec())
}

fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn roots_of(q: &ValuedQuiver, ed: &EulerData) -> RootSet {
    RootEnumeration::run(q, ed, Caps::default(), Exec::default()).expect("roots").set
}

fn domains_of(q: &ValuedQuiver, roots: &RootSet) -> BTreeMap<IntVector, StabilityDomain> {
    let session = OracleSession::new(q, 2, roots, 0, Exec::default()).expect("oracle session");
    oracle_domains(&session, Exec::default()).expect("oracle domains")
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn timed<F: FnOnce() -> Outcome>(f: F) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

fn within(d: Duration, limit: Duration) -> bool {
    d < limit
}

fn criterion_1() -> Outcome {
    let (_, ed) = load("g2ish.json");
    let t = Instant::now();
    let ed2 = EulerData::new(&load_quiver(fixture("g2ish.json")).unwrap()).unwrap();
    let el = t.elapsed();
    let checks = [
        ("L", ed.l == m(&[&[1, 0], &[-3, 1]])),
        ("D", ed.d_matrix() == m(&[&[2, 0], &[0, 3]])),
        ("E", ed.e == m(&[&[2, 0], &[-6, 3]])),
        ("R", ed.r == m(&[&[1, 0], &[-2, 1]])),
        ("B", ed.b == m(&[&[0, -3], &[2, 0]])),
        ("DB", ed.d_matrix().mul(&ed.b) == m(&[&[0, -6], &[6, 0]])),
        ("LD=E=DR", ed.l.mul(&ed.d_matrix()) == ed.e && ed.d_matrix().mul(&ed.r) == ed.e),
        ("rebuild", ed2.e == ed.e),
    ];
    let bad: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let fast = within(el, Duration::from_millis(1));
    outcome(
        bad.is_empty() && fast,
        format!("L,D,E,R,B,DB exact; mismatches {:?}; EulerData built in {:?} (limit 1ms)", bad, el),
    )
}

fn criterion_2() -> Outcome {
    let (q, ed) = load("a3.json");
    let (roots, t_roots) = {
        let t = Instant::now();
        let r = roots_of(&q, &ed);
        (r, t.elapsed())
    };
    let (fan, t_fan) = {
        let t = Instant::now();
        let f = enumerate_fan(&ed, 1000, Exec::default()).unwrap();
        (f, t.elapsed())
    };
    let domains = domains_of(&q, &roots);
    let t = Instant::now();
    let model = build_model(&ed, &fan, &domains).unwrap();
    let t_pic = t.elapsed();
    let limit = Duration::from_secs(1);
    let ok = roots.len() == 6
        && roots.complete
        && fan.len() == 14
        && fan.complete
        && model.markers.len() == 9
        && model.curves.len() == 6
        && model.regions.len() == 14
        && [t_roots, t_fan, t_pic].iter().all(|&d| within(d, limit));
    outcome(
        ok,
        format!(
            "roots {} ({:?}), c-matrices {} ({:?}), markers {}, curves {}, regions {} ({:?}); limit 1s each",
            roots.len(),
            t_roots,
            fan.len(),
            t_fan,
            model.markers.len(),
            model.curves.len(),
            model.regions.len(),
            t_pic
        ),
    )
}

fn sweep(name: &str) -> (usize, usize, bool) {
    let (q, ed) = load(name);
    let roots = roots_of(&q, &ed);
    let fan: Fan = enumerate_fan(&ed, 10_000, Exec::default()).unwrap();
    let rep = verify_cvector_theorem(&ed, &fan, &roots);
    (fan.len(), rep.failures().count(), fan.complete)
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["a3.json", "b3_real.json", "b3_quat.json"] {
        let (states, violations, complete) = sweep(name);
        ok &= violations == 0 && complete;
        parts.push(format!("{name}: {states} states, {violations} violations"));
    }
    let el = t.elapsed();
    ok &= within(el, Duration::from_secs(10));
    outcome(ok, format!("{}; total {:?} (limit 10s)", parts.join("; "), el))
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut names = Vec::new();
    for name in ["a3.json", "b3_real.json", "b3_quat.json", "g2ish.json"] {
        let (_, ed) = load(name);
        let g = gamma_of(&ed, &initial_state(&ed)).ok();
        let good = g == Some(IntMatrix::identity(ed.n()).scale(-1));
        ok &= good;
        names.push(format!("{name}={}", if good { "ok" } else { "BAD" }));
    }
    outcome(ok, format!("Gamma of the shifted projectives equals -I exactly: {}", names.join(", ")))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut b3_domains = None;
    for name in ["a3.json", "b3_real.json"] {
        let (q, ed) = load(name);
        let roots = roots_of(&q, &ed);
        let domains = domains_of(&q, &roots);
        let mut mism = 0;
        for d in domains.values() {
            mism += verify_stability_theorem(d, 4, Exec::default()).mismatches().count();
        }
        ok &= mism == 0 && domains.len() == roots.len();
        parts.push(format!("{name}: {} roots, {mism} mismatches in [-4,4]^3", domains.len()));
        if name == "b3_real.json" {
            b3_domains = Some(domains);
        }
    }
    let el = t.elapsed();
    ok &= within(el, Duration::from_secs(120));

    let domains = b3_domains.unwrap();
    let d = &domains[&v(&[1, 1, 1])];
    let a1 = v(&[0, 0, 1]);
    let cert_text = match d.perp_simples.iter().position(|e| *e == a1) {
        Some(i1) => {
            let i2 = 1 - i1;
            let a2 = d.perp_simples[i2].clone();
            let coeffs = |target: &IntVector| {
                d.delta_contains(target).filter(|c| c.l.iter().all(|&x| x == 0)).map(|c| (c.k[i1], c.k[i2]))
            };
            let z2 = coeffs(&v(&[1, 2, 2]));
            let x = coeffs(&v(&[1, 2, 1]));
            let good = z2 == Some((2, 1)) && x == Some((1, 1));
            ok &= good;
            format!("alpha_2 = {a2}; dim Z2 = (1,2,2) -> {z2:?}, dim X = (1,2,1) -> {x:?} (want (2,1), (1,1))")
        }
        None => {
            ok = false;
            format!("alpha_1 = (0,0,1) not among perp simples {:?}", d.perp_simples)
        }
    };
    outcome(ok, format!("{}; {cert_text}; {:?} (limit 120s)", parts.join("; "), el))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["a3.json", "b3_real.json", "g2ish.json"] {
        let (q, ed) = load(name);
        let mut roots = roots_of(&q, &ed);
        let domains = if roots.complete {
            domains_of(&q, &roots)
        } else {
            // Infinite type: a window of small roots; weight law on the
            // roots whose perpendicular simples stay inside the window.
            roots.roots.retain(|b| b.max_abs() <= 8);
            let session = OracleSession::new(&q, 2, &roots, 0, Exec::default()).expect("oracle session");
            roots
                .roots
                .iter()
                .filter(|b| b.max_abs() <= 3)
                .map(|b| (b.clone(), StabilityDomain::from_oracle(&session, b).expect("domain")))
                .collect()
        };
        let opts = VerifyOptions { q: Some(2), ..Default::default() };
        match oracle_suite(&q, &ed, 2, &domains, &roots, &opts) {
            Ok(rep) => {
                let fails = rep.failures().count();
                ok &= fails == 0;
                parts.push(format!("{name}: {} roots, {} checks, {fails} failures", domains.len(), rep.checks.len()));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    let (_, quat) = load("b3_quat.json");
    parts.push(format!("b3_quat.json: not realizable over F_q (z = {})", IntVector(quat.z.clone())));
    outcome(
        ok,
        format!(
            "200 Hom/Ext pairs + 100 weight-law pairs per root, exact over F_2; {}; {:?}",
            parts.join("; "),
            t.elapsed()
        ),
    )
}

/// Printed chart at `(d1, d2, f1, f2)`: `(γ, γ', γ'', f, b, sign)` per row.
fn printed_chart(st: &Rank2State) -> Vec<(IntVector, IntVector, IntVector, i64, i64, i64)> {
    let [d1, d2] = st.d;
    let [f1, f2] = st.f;
    let g = |o| st.dim(o);
    let (z1, z2, z3) = (g(Obj::Z(1)), g(Obj::Z(2)), g(Obj::Z(3)));
    let (y1, y2) = (g(Obj::Y(1)), g(Obj::Y(2)));
    vec![
        (z3.clone(), z2.clone(), z2.scale(d1).sub(&z3), f1, -d1, -1),
        (z2.clone(), z1.clone(), z1.scale(d2).sub(&z2), f2, -d2, -1),
        (z1.clone(), y1.neg(), z1.neg(), f1, -d1, 1),
        (y1.neg(), z1.neg(), y1.clone(), f2, -d2, 1),
        (z1.neg(), y1.clone(), y1.scale(d1).add(&z1), f1, -d1, -1),
        (y1.clone(), y2.clone(), y2.scale(d2).sub(&y1), f2, -d2, -1),
    ]
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (d1, d2, f1, f2, want) in [(1, 1, 1, 1, 3), (2, 1, 1, 2, 4), (1, 2, 2, 1, 4), (3, 1, 1, 3, 6), (1, 3, 3, 1, 6)]
    {
        let st = rank2_sequences(d1, d2, f1, f2, 50).unwrap();
        let good = st.s == Some(want) && st.terminated && st.y.len() == want;
        ok &= good;
        parts.push(format!("s({d1},{d2})={}", st.s.map_or("?".into(), |s| s.to_string())));
    }
    for (d1, d2) in [(4, 1), (2, 2), (1, 4), (5, 1), (3, 3)] {
        let st = rank2_sequences(d1, d2, d2, d1, 30).unwrap();
        let good = st.s.is_none() && !st.terminated;
        ok &= good;
        if !good {
            parts.push(format!("({d1},{d2}) terminated unexpectedly"));
        }
    }
    parts.push("d1*d2>=4 flagged non-terminating".into());
    let mut triples = 0;
    for (d1, d2, f1, f2) in [(1, 1, 1, 1), (2, 1, 1, 2), (3, 1, 1, 3), (2, 2, 1, 1), (4, 1, 1, 4)] {
        let st = rank2_sequences(d1, d2, f1, f2, 12).unwrap();
        let rep = consecutive_formula_check(&st, 30);
        ok &= rep.passed();
        triples += rep.checks.len();
    }
    parts.push(format!("formula holds on both sequences ({triples} sequence checks)"));
    let mut chart_ok = true;
    for (label, d1, d2, f1, f2) in [("B2", 2, 1, 1, 2), ("G2", 3, 1, 1, 3)] {
        let st = rank2_sequences(d1, d2, f1, f2, 50).unwrap();
        let m = st.m;
        let printed_pairs = [(0, m), (0, m), (0, m), (0, m), (-m, 0), (0, m)];
        for (k, (row, want)) in st.chart().iter().zip(printed_chart(&st)).enumerate() {
            let structural = (&row.gamma, &row.gamma_p, &row.gamma_pp, row.f, row.b, row.sign)
                == (&want.0, &want.1, &want.2, want.3, want.4, want.5);
            let pair = (row.pair_pg, row.pair_gp);
            // Rows 4 and 5 carry each other's pairing columns in print.
            let expected_pair = match k {
                3 => printed_pairs[4],
                4 => printed_pairs[3],
                _ => printed_pairs[k],
            };
            if !structural || pair != expected_pair {
                chart_ok = false;
                parts.push(format!("{label} row {} differs", k + 1));
            }
        }
    }
    ok &= chart_ok;
    parts.push("six chart rows match at B2 and G2 (pairing columns of rows 4/5 transposed in print)".into());
    let el = t.elapsed();
    ok &= within(el, Duration::from_secs(1));
    outcome(ok, format!("{}; {:?} (limit 1s)", parts.join("; "), el))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let (_, ed) = load("b3_quat.json");
    let table: [(&[i64], i64, &[i64]); 9] = [
        (&[1, 0, 0], 2, &[1, 0, 0]),
        (&[1, 1, 0], 1, &[2, 1, 0]),
        (&[1, 1, 1], 1, &[2, 1, 1]),
        (&[1, 2, 0], 2, &[1, 1, 0]),
        (&[1, 2, 1], 1, &[2, 2, 1]),
        (&[0, 1, 0], 1, &[0, 1, 0]),
        (&[1, 2, 2], 2, &[1, 1, 1]),
        (&[0, 1, 1], 1, &[0, 1, 1]),
        (&[0, 0, 1], 1, &[0, 0, 1]),
    ];
    let mut ok = true;
    let mut bad = Vec::new();
    for (beta, z, bar) in table {
        let beta = v(beta);
        let got = z_beta(&ed, &beta, None).and_then(|zb| beta_bar(&ed, &beta, zb).map(|bb| (zb, bb)));
        if got.as_ref().ok() != Some(&(z, v(bar))) {
            ok = false;
            bad.push(format!("{beta}: {got:?}"));
        }
    }
    let (q, _) = load("b3_quat.json");
    let roots = roots_of(&q, &ed);
    ok &= roots.len() == 9 && table.iter().all(|r| roots.contains(&v(r.0)));
    for name in ["a3.json", "b3_real.json", "g2ish.json"] {
        // EulerData construction fails on a non-integral reduced matrix.
        let (_, e) = load(name);
        ok &= e.b_reduced == e.b;
    }
    ok &= ed.b_reduced != ed.b;
    let words = conjugation_commutes(&ed, 100, 20, 0);
    ok &= words.passed();
    let el = t.elapsed();
    ok &= within(el, Duration::from_secs(5));
    outcome(
        ok,
        format!(
            "9-row table exact (mismatches {bad:?}); B-bar integral for all fixtures; {}; {:?} (limit 5s)",
            words.checks.first().map_or(String::new(), |c| c.detail.clone()),
            el
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["a3.json", "b3_real.json"] {
        let opts = VerifyOptions { q: Some(2), radius: 4, seed: 0, ..Default::default() };
        let a = run_verify_all(&fixture(name), &opts, &Cache::disabled()).unwrap();
        let b = run_verify_all(&fixture(name), &VerifyOptions { exec: Exec::Sequential, ..opts }, &Cache::disabled())
            .unwrap();
        let same = a.report.to_tsv() == b.report.to_tsv() && a.svg == b.svg && a.svg.is_some();
        ok &= same && a.report.passed();
        parts.push(format!(
            "{name}: report {} bytes, svg {} bytes, identical={same}, passed={}",
            a.report.to_tsv().len(),
            a.svg.as_ref().map_or(0, |s| s.len()),
            a.report.passed()
        ));
    }
    outcome(ok, format!("parallel run vs sequential run: {}", parts.join("; ")))
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 9] = [
        ("euler fixture", criterion_1),
        ("A3 counts", criterion_2),
        ("c-vector sweep", criterion_3),
        ("initial gamma", criterion_4),
        ("stability box", criterion_5),
        ("oracle properties", criterion_6),
        ("rank-2 suite", criterion_7),
        ("reduced weights", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (o, el) = timed(f);
        if !o.ok {
            failed += 1;
        }
        println!("{} {} {name} [{:.3}s]: {}", if o.ok { "PASS" } else { "FAIL" }, k + 1, el.as_secs_f64(), o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
