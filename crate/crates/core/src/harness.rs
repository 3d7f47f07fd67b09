//! End-to-end verification: every suite over one quiver, aggregated into a
//! single deterministic report.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::braid::{is_finite_type, Caps, RootEnumeration, RootSet};
use crate::cluster::reduced::{beta_bar, conjugation_commutes, reduced_fan_check, z_beta};
use crate::cluster::{
    enumerate_fan, gamma_of, generic_decomposition, initial_state, mutate_c_columns, mutate_extended,
    one_positive_column_check, verify_cvector_theorem, Fan, DEFAULT_FAN_CAP,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::io::{load_quiver, Cache};
use crate::linalg::{IntMatrix, IntVector};
use crate::oracle::rep::{hom_ext, ModulatedRep, RepMorphism};
use crate::oracle::semiinv::{det_semiinvariant, predicted_weight_value, Presentation};
use crate::oracle::{FieldTower, OracleSession};
use crate::picture::{build_model, check_model, render_svg, RenderOptions};
use crate::quiver::{EulerData, ValuedQuiver};
use crate::report::{Report, Status};
use crate::stability::{
    oracle_domains, verify_stability_theorem, OverrideEntry, Provenance, StabilityDomain, SubrootOverride,
};
use crate::TOOL_VERSION;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub q: Option<u64>,
    pub radius: i64,
    pub seed: u64,
    pub fan_cap: usize,
    pub caps: Caps,
    pub subroot_override: Option<PathBuf>,
    pub exec: Exec,
    pub euler_pairs: usize,
    pub weight_pairs: usize,
    pub words: usize,
    pub highlight: Vec<IntVector>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            q: None,
            radius: 4,
            seed: 0,
            fan_cap: DEFAULT_FAN_CAP,
            caps: Caps::default(),
            subroot_override: None,
            exec: Exec::default(),
            euler_pairs: 200,
            weight_pairs: 100,
            words: 100,
            highlight: Vec::new(),
        }
    }
}

pub struct VerifyOutcome {
    pub report: Report,
    pub svg: Option<String>,
}

/// Serializable form of a domain map for the cache.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct CachedDomains {
    provenance: Provenance,
    entries: Vec<OverrideEntry>,
}

pub fn roots_cached(q: &ValuedQuiver, ed: &EulerData, caps: Caps, cache: &Cache, exec: Exec) -> Result<RootSet> {
    let params = format!("{}:{}", caps.max_sequences, caps.max_coord);
    let (roots, _) = cache
        .get_or_compute(&q.canonical_hash(), "roots", &params, || Ok(RootEnumeration::run(q, ed, caps, exec)?.set))?;
    Ok(roots)
}

pub fn fan_cached(q: &ValuedQuiver, ed: &EulerData, cap: usize, cache: &Cache, exec: Exec) -> Result<Fan> {
    let (fan, _) =
        cache.get_or_compute(&q.canonical_hash(), "fan", &cap.to_string(), || enumerate_fan(ed, cap, exec))?;
    Ok(fan)
}

/// Where the stability domains came from, or why there are none.
pub enum DomainSource {
    Available(BTreeMap<IntVector, StabilityDomain>),
    Unavailable(String),
}

/// Oracle domains at field order `order`, cached.
pub fn oracle_domains_cached(
    q: &ValuedQuiver,
    ed: &EulerData,
    roots: &RootSet,
    order: u64,
    seed: u64,
    cache: &Cache,
    exec: Exec,
) -> Result<BTreeMap<IntVector, StabilityDomain>> {
    let params = format!("q={order};seed={seed};roots={}", roots.len());
    let (cached, _) = cache.get_or_compute(&q.canonical_hash(), "domains", &params, || {
        let session = OracleSession::new(q, order, roots, seed, exec)?;
        let domains = oracle_domains(&session, exec)?;
        let ov = SubrootOverride::from_domains("", &domains);
        Ok(CachedDomains { provenance: Provenance::OracleCertified { q: order, seed }, entries: ov.domains })
    })?;
    cached
        .entries
        .into_iter()
        .map(|e| {
            StabilityDomain::new(ed, e.beta.clone(), e.subroots, e.perp_simples, cached.provenance.clone())
                .map(|d| (e.beta, d))
        })
        .collect()
}

/// Override file if given, else the oracle when the quiver is realizable
/// over `F_q`.
#[allow(clippy::too_many_arguments)]
pub fn resolve_domains(
    q: &ValuedQuiver,
    ed: &EulerData,
    roots: &RootSet,
    order: Option<u64>,
    seed: u64,
    subroot_override: Option<&Path>,
    cache: &Cache,
    exec: Exec,
) -> Result<DomainSource> {
    if let Some(path) = subroot_override {
        return Ok(DomainSource::Available(SubrootOverride::load(path)?.domains(ed)?));
    }
    let Some(order) = order else {
        return Ok(DomainSource::Unavailable("no --q given and no subroot override".into()));
    };
    if let Some(i) = ed.z.iter().position(|&z| z != 1) {
        return Ok(DomainSource::Unavailable(format!(
            "oracle unsupported: z_{} = {} (non-commutative or non-split modulation); supply --subroot-override",
            i + 1,
            ed.z[i]
        )));
    }
    if !roots.complete {
        return Ok(DomainSource::Unavailable("root enumeration incomplete".into()));
    }
    Ok(DomainSource::Available(oracle_domains_cached(q, ed, roots, order, seed, cache, exec)?))
}

pub fn euler_suite(q: &ValuedQuiver, ed: &EulerData) -> Report {
    let mut r = Report::new();
    let s = "euler";
    let n = ed.n();
    let d = ed.d_matrix();
    r.check(s, "e_eq_ld", ed.e == ed.l.mul(&d), "");
    r.check(s, "e_eq_dr", ed.e == d.mul(&ed.r), "");
    r.check(s, "b_eq_lt_minus_r", ed.b == ed.l.transpose().sub(&ed.r), "");
    r.check(s, "p_inverse_of_l", ed.p.mul(&ed.l) == IntMatrix::identity(n), "");
    r.check(s, "db_skew_symmetric", d.mul(&ed.b).is_skew_symmetric(), "");
    let f = q.f();
    let sym = q.arrows().iter().all(|a| a.d_st * f[a.target] == f[a.source] * a.d_ts);
    r.check(s, "valuation_symmetry", sym, format!("{} arrows", q.arrows().len()));
    r.check(s, "b_reduced_integral", true, format!("z = {}", IntVector(ed.z.clone())));
    let mut proj_ok = true;
    let mut diag_ok = true;
    for i in 0..n {
        let ei = IntVector::unit(n, i);
        diag_ok &= ed.pair(&ei, &ei) == ed.d[i];
        for j in 0..n {
            let want = if i == j { ed.d[i] } else { 0 };
            proj_ok &= ed.pair(&ed.projective(i), &IntVector::unit(n, j)) == want;
        }
    }
    r.check(s, "simple_self_pairing_eq_f", diag_ok, "");
    r.check(s, "projective_pairing", proj_ok, "<P_i, e_j> = f_i delta_ij");
    r
}

pub fn roots_suite(ed: &EulerData, roots: &RootSet) -> Report {
    let mut r = Report::new();
    let s = "roots";
    let finite = is_finite_type(ed);
    if roots.complete {
        r.push(s, "enumeration_complete", Status::Pass, format!("{} roots", roots.len()));
    } else {
        r.push(s, "enumeration_complete", Status::Skip, format!("incomplete within caps; {} roots found", roots.len()));
    }
    r.check(s, "finite_type_iff_complete", finite == roots.complete, format!("positive definite: {finite}"));
    let norms_ok = roots.roots.iter().all(|b| b.is_nonnegative() && ed.d.contains(&ed.pair(b, b)));
    r.check(s, "self_pairing_is_some_f", norms_ok, "");
    let simples = (0..ed.n()).all(|i| roots.contains(&IntVector::unit(ed.n(), i)));
    r.check(s, "simples_present", simples, "");
    r
}

pub fn cvector_suite(ed: &EulerData, fan: &Fan, roots: &RootSet) -> Report {
    let mut r = Report::new();
    let s = "cvectors";
    let init = initial_state(ed);
    let g0 = gamma_of(ed, &init).ok();
    r.check(s, "initial_gamma_eq_minus_identity", g0 == Some(IntMatrix::identity(ed.n()).scale(-1)), "");
    if fan.complete {
        r.push(s, "fan_complete", Status::Pass, format!("{} states", fan.len()));
    } else {
        r.push(
            s,
            "fan_complete",
            Status::Skip,
            format!("stopped at cap {} or entry bound; checks cover enumerated states only", fan.cap),
        );
    }
    r.extend(verify_cvector_theorem(ed, fan, roots));
    r.extend(one_positive_column_check(fan));
    let mut rule_ok = true;
    for st in &fan.states {
        for k in 0..st.n() {
            rule_ok &= mutate_extended(&st.b, &st.c, k).1 == mutate_c_columns(&st.b, &st.c, k);
        }
    }
    r.check(s, "column_rule_matches_matrix_rule", rule_ok, "");
    if fan.complete && roots.complete {
        let cset: BTreeSet<IntVector> = fan.states.iter().flat_map(|st| st.c.columns()).map(|c| c.abs()).collect();
        r.check(s, "abs_cvectors_eq_roots", cset == roots.roots, format!("{} vs {}", cset.len(), roots.len()));
        let mut targets: Vec<IntVector> = roots.sorted();
        let sum_p = (0..ed.n()).fold(IntVector::zeros(ed.n()), |acc, i| acc.add(&ed.projective(i)));
        targets.push(sum_p.clone());
        targets.push(sum_p.neg());
        let mut bad = Vec::new();
        for a in &targets {
            match generic_decomposition(fan, a) {
                Ok((idx, coeffs)) if fan.states[idx].v.mul_vec(&coeffs) == *a => {}
                Ok(_) => bad.push(format!("{a}: reconstruction mismatch")),
                Err(e) => bad.push(e.to_string()),
            }
        }
        if bad.is_empty() {
            r.push(s, "generic_decomposition", Status::Pass, format!("{} vectors", targets.len()));
        }
        for b in bad {
            r.push(s, "generic_decomposition", Status::Fail, b);
        }
    }
    r
}

pub fn reduced_suite(ed: &EulerData, fan: &Fan, roots: &RootSet, words: usize, seed: u64) -> Report {
    let mut r = Report::new();
    let s = "reduced";
    r.check(s, "b_reduced_integral", true, format!("{:?}", ed.b_reduced));
    r.extend(conjugation_commutes(ed, words, 20, seed));
    r.extend(reduced_fan_check(ed, fan));
    for b in roots.sorted() {
        match z_beta(ed, &b, None).and_then(|z| beta_bar(ed, &b, z).map(|bb| (z, bb))) {
            Ok((z, bb)) => r.push(s, "beta_bar", Status::Pass, format!("{b} z={z} -> {bb}")),
            Err(e @ Error::AmbiguousEndoClass { .. }) => r.push(s, "beta_bar", Status::Skip, e.to_string()),
            Err(e) => r.push(s, "beta_bar", Status::Fail, e.to_string()),
        }
    }
    r
}

pub fn stability_suite(domains: &BTreeMap<IntVector, StabilityDomain>, radius: i64, exec: Exec) -> Report {
    let mut r = Report::new();
    let s = "stability";
    for (beta, d) in domains {
        let rep = verify_stability_theorem(d, radius, exec);
        let mism = rep.mismatches().count();
        let detail = format!("{} members of {} points; {}", rep.members(), rep.points.len(), d.provenance);
        r.check(
            s,
            format!("dzss_eq_delta {beta}"),
            mism == 0,
            if mism == 0 { detail } else { format!("{mism} mismatches") },
        );
        let expand_ok = rep.points.iter().all(|p| p.certificate.as_ref().is_none_or(|c| d.expand(c) == p.alpha));
        r.check(s, format!("certificates_expand {beta}"), expand_ok, "");
    }
    r
}

fn random_dims(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    loop {
        let d: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        if d.iter().any(|&x| x > 0) {
            return d;
        }
    }
}

fn random_iso(tower: &FieldTower, end: &crate::oracle::rep::HomExt, rng: &mut ChaCha8Rng) -> RepMorphism {
    loop {
        let g = end.random_element(tower, rng);
        if g.is_iso(tower) {
            return g;
        }
    }
}

/// Euler-form property on random pairs and the weight law on one
/// presentation per root.
pub fn oracle_suite(
    q: &ValuedQuiver,
    ed: &EulerData,
    order: u64,
    domains: &BTreeMap<IntVector, StabilityDomain>,
    roots: &RootSet,
    opts: &VerifyOptions,
) -> Result<Report> {
    let mut r = Report::new();
    let s = "oracle";
    let tower = FieldTower::build(q, order)?;
    let n = ed.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pairs: Vec<(ModulatedRep, ModulatedRep)> = (0..opts.euler_pairs)
        .map(|_| {
            let a = random_dims(&mut rng, n);
            let b = random_dims(&mut rng, n);
            (ModulatedRep::random(&tower, &a, &mut rng), ModulatedRep::random(&tower, &b, &mut rng))
        })
        .collect();
    let results = opts.exec.map(&pairs, |(v, w)| {
        let h = hom_ext(&tower, v, w);
        h.hom_dim_k() as i64 - h.ext_dim_k() as i64 == ed.pair(&v.dim_vector(), &w.dim_vector())
    });
    let ok = results.iter().filter(|&&x| x).count();
    r.check(s, "hom_minus_ext_eq_euler_form", ok == pairs.len(), format!("{ok}/{} random pairs", pairs.len()));

    let session = OracleSession::new(q, order, roots, opts.seed, opts.exec)?;
    let list: Vec<(IntVector, &StabilityDomain)> = domains.iter().map(|(b, d)| (b.clone(), d)).collect();
    let checks = opts.exec.map(&list, |(beta, d)| -> Result<(bool, usize, String)> {
        let m = session.module(beta).ok_or_else(|| Error::Inconclusive { beta: beta.clone() })?;
        let alpha = d.perp_simples.iter().fold(IntVector::zeros(n), |acc, e| acc.add(e));
        let gamma = ed.l.transpose().mul_vec(&alpha);
        let g0 = IntVector(gamma.0.iter().map(|&x| x.max(0)).collect());
        let g1 = IntVector(gamma.0.iter().map(|&x| (-x).max(0)).collect());
        let mut rng = ChaCha8Rng::seed_from_u64(crate::oracle::root_seed(opts.seed, beta));
        let mut found = None;
        for _ in 0..64 {
            let pres = Presentation::random(&tower, &g1, &g0, &mut rng);
            let sigma = det_semiinvariant(&tower, &pres, m)?;
            if sigma != 0 {
                found = Some((pres, sigma));
                break;
            }
        }
        let Some((pres, sigma)) = found else {
            return Ok((false, 0, format!("no nonzero semi-invariant found at alpha={alpha}")));
        };
        let end_t = hom_ext(&tower, &pres.target.rep, &pres.target.rep);
        let end_s = hom_ext(&tower, &pres.source.rep, &pres.source.rep);
        let mut agree = 0;
        for _ in 0..opts.weight_pairs {
            let g = random_iso(&tower, &end_t, &mut rng);
            let h = random_iso(&tower, &end_s, &mut rng);
            let moved = Presentation { map: g.compose(&tower, &pres.map).compose(&tower, &h), ..pres.clone() };
            let lhs = det_semiinvariant(&tower, &moved, m)?;
            if lhs == predicted_weight_value(&tower, sigma, &g, &h, &pres, beta) {
                agree += 1;
            }
        }
        Ok((agree == opts.weight_pairs, agree, format!("alpha={alpha}")))
    });
    for ((beta, _), res) in list.iter().zip(checks) {
        let (ok, agree, detail) = res?;
        r.check(s, format!("weight_law {beta}"), ok, format!("{agree}/{} pairs, {detail}", opts.weight_pairs));
        r.check(s, format!("weight_sign_coherent {beta}"), beta.is_nonnegative(), "");
    }
    Ok(r)
}

/// Runs all suites on the quiver at `path`.
pub fn run_verify_all(path: &Path, opts: &VerifyOptions, cache: &Cache) -> Result<VerifyOutcome> {
    let q = load_quiver(path)?;
    let ed = EulerData::new(&q)?;
    let mut report = Report::new();
    report.meta("tool", TOOL_VERSION);
    report.meta("quiver", q.name());
    report.meta("quiver_hash", q.canonical_hash());
    report.meta("seed", opts.seed);
    report.meta("q", opts.q.map_or("-".to_string(), |x| x.to_string()));
    report.meta("box", opts.radius);

    report.extend(euler_suite(&q, &ed));
    let roots = roots_cached(&q, &ed, opts.caps, cache, opts.exec)?;
    report.extend(roots_suite(&ed, &roots));

    let domains = match resolve_domains(
        &q,
        &ed,
        &roots,
        opts.q,
        opts.seed,
        opts.subroot_override.as_deref(),
        cache,
        opts.exec,
    )? {
        DomainSource::Available(d) => {
            report.extend(stability_suite(&d, opts.radius, opts.exec));
            Some(d)
        }
        DomainSource::Unavailable(why) => {
            report.push("stability", "dzss_eq_delta", Status::Skip, why);
            None
        }
    };

    let fan = fan_cached(&q, &ed, opts.fan_cap, cache, opts.exec)?;
    report.extend(cvector_suite(&ed, &fan, &roots));
    report.extend(reduced_suite(&ed, &fan, &roots, opts.words, opts.seed));

    match (opts.q, &domains) {
        (Some(order), Some(d)) if ed.z.iter().all(|&z| z == 1) => {
            report.extend(oracle_suite(&q, &ed, order, d, &roots, opts)?);
        }
        (Some(_), _) => {
            report.push("oracle", "hom_minus_ext_eq_euler_form", Status::Skip, "oracle unavailable for this quiver")
        }
        (None, _) => report.push("oracle", "hom_minus_ext_eq_euler_form", Status::Skip, "no --q given"),
    }

    let mut svg = None;
    match (&domains, ed.n(), fan.complete) {
        (Some(d), 3, true) => {
            let model = build_model(&ed, &fan, d)?;
            report.extend(check_model(&ed, &fan, d, &model));
            svg = Some(render_svg(&model, &RenderOptions { highlight: opts.highlight.clone() }));
        }
        _ => report.push("picture", "model", Status::Skip, "needs rank 3, a complete fan and domains"),
    }
    Ok(VerifyOutcome { report, svg })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
    }

    #[test]
    fn a3_passes_everything() {
        let opts =
            VerifyOptions { q: Some(2), radius: 2, euler_pairs: 20, weight_pairs: 5, words: 10, ..Default::default() };
        let out = run_verify_all(&fixture("a3.json"), &opts, &Cache::disabled()).unwrap();
        assert!(out.report.passed(), "{}", out.report.failures_tsv());
        assert!(out.svg.is_some());
        assert!(out.report.checks.iter().all(|c| c.status != Status::Skip));
    }

    #[test]
    fn quaternion_fixture_skips_oracle_without_override() {
        let opts = VerifyOptions { q: Some(2), radius: 1, words: 5, ..Default::default() };
        let out = run_verify_all(&fixture("b3_quat.json"), &opts, &Cache::disabled()).unwrap();
        assert!(out.report.passed(), "{}", out.report.failures_tsv());
        let skip = out.report.checks.iter().find(|c| c.suite == "stability").unwrap();
        assert_eq!(skip.status, Status::Skip);
        assert!(skip.detail.contains("oracle unsupported"));
    }
}
