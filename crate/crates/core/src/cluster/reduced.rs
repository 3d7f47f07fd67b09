//! Reduced weights: rescaling by `Z = diag(f_i / n_i)`.
//!
//! For a root `β` the endomorphism division algebra of `M_β` is one of the
//! vertex algebras, so `z_β` is read off from the vertices whose `f` equals
//! `⟨β, β⟩`. When those vertices disagree on `z` the caller must supply it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{mutate_extended, ExchangeState, Fan};
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, IntVector};
use crate::quiver::EulerData;
use crate::report::{Report, Status};

/// `z_β` by matching `⟨β, β⟩` against the vertex `f` values.
pub fn z_beta(ed: &EulerData, beta: &IntVector, explicit: Option<i64>) -> Result<i64> {
    if let Some(z) = explicit {
        return Ok(z);
    }
    let f = ed.pair(beta, beta);
    let mut candidates: Vec<i64> = (0..ed.n()).filter(|&i| ed.d[i] == f).map(|i| ed.z[i]).collect();
    candidates.sort_unstable();
    candidates.dedup();
    match candidates[..] {
        [] => Err(Error::NoEndoClass { beta: beta.clone(), f }),
        [z] => Ok(z),
        _ => Err(Error::AmbiguousEndoClass { beta: beta.clone(), candidates }),
    }
}

/// `(1/z_β)(z_1 β_1, ..., z_n β_n)`.
pub fn beta_bar(ed: &EulerData, beta: &IntVector, z_b: i64) -> Result<IntVector> {
    let mut out = Vec::with_capacity(beta.len());
    for (i, &b) in beta.0.iter().enumerate() {
        let num = ed.z[i] * b;
        if num % z_b != 0 {
            return Err(Error::Integrality(format!("reduced weight of {beta} with z = {z_b}")));
        }
        out.push(num / z_b);
    }
    Ok(IntVector(out))
}

/// `Z M Z⁻¹`, asserted integral.
pub fn conjugate(ed: &EulerData, m: &IntMatrix) -> Result<IntMatrix> {
    let mut out = IntMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let num = m.get(i, j) * ed.z[i];
            if num % ed.z[j] != 0 {
                return Err(Error::Integrality(format!("conjugated entry ({}, {})", i + 1, j + 1)));
            }
            out.set(i, j, num / ed.z[j]);
        }
    }
    Ok(out)
}

/// One row per root: `(β, z_β, β̄)`.
pub fn reduced_table(ed: &EulerData, roots: &[IntVector]) -> Result<Vec<(IntVector, i64, IntVector)>> {
    roots
        .iter()
        .map(|b| {
            let z = z_beta(ed, b, None)?;
            Ok((b.clone(), z, beta_bar(ed, b, z)?))
        })
        .collect()
}

/// Checks `Z C Z⁻¹` columns against `-ε_j β̄_j` for one state, with `z_j`
/// taken positionally and cross-checked against f-matching when that is
/// unambiguous.
pub fn reduced_weights(ed: &EulerData, state: &ExchangeState) -> Report {
    let mut report = Report::new();
    let w = state.word_string();
    let cbar = match conjugate(ed, &state.c) {
        Ok(c) => c,
        Err(e) => {
            report.push("reduced", "cbar_integral", Status::Fail, format!("{w}: {e}"));
            return report;
        }
    };
    let gamma = state.gamma();
    for j in 0..state.n() {
        let beta = gamma.col(j).abs();
        let eps = ed.pair(&state.v.col(j), &beta).signum();
        let zj = ed.z[j];
        match z_beta(ed, &beta, None) {
            Ok(z) if z != zj => {
                report.push(
                    "reduced",
                    "z_positional",
                    Status::Fail,
                    format!("{w} col {}: f-matched {z}, position {zj}", j + 1),
                );
            }
            Err(Error::NoEndoClass { .. }) => {
                report.push("reduced", "z_positional", Status::Fail, format!("{w} col {}: no vertex matches", j + 1));
            }
            _ => {}
        }
        match beta_bar(ed, &beta, zj) {
            Ok(bb) if cbar.col(j) == bb.scale(-eps) => {}
            Ok(bb) => report.push(
                "reduced",
                "cbar_eq_minus_eps_beta_bar",
                Status::Fail,
                format!("{w} col {}: {:?} vs {:?}", j + 1, cbar.col(j), bb.scale(-eps)),
            ),
            Err(e) => report.push("reduced", "cbar_eq_minus_eps_beta_bar", Status::Fail, format!("{w}: {e}")),
        }
    }
    report
}

/// Sweeps [`reduced_weights`] over a fan and summarizes.
pub fn reduced_fan_check(ed: &EulerData, fan: &Fan) -> Report {
    let mut report = Report::new();
    let mut failures = Vec::new();
    for s in &fan.states {
        failures.extend(reduced_weights(ed, s).checks);
    }
    if failures.is_empty() {
        report.push("reduced", "cbar_eq_minus_eps_beta_bar", Status::Pass, format!("{} states", fan.len()));
    }
    report.checks.extend(failures);
    report
}

/// `Z μ_k([B; C]) Z⁻¹ = μ̄_k([B̄; C̄])` along seeded random words.
pub fn conjugation_commutes(ed: &EulerData, words: usize, max_len: usize, seed: u64) -> Report {
    let mut report = Report::new();
    let n = ed.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = 0usize;
    let mut bad = Vec::new();
    'words: for w in 0..words {
        let len = rng.gen_range(1..=max_len.max(1));
        let (mut b, mut c) = (ed.b.clone(), IntMatrix::identity(n));
        let (mut bb, mut cb) = (ed.b_reduced.clone(), IntMatrix::identity(n));
        for _ in 0..len {
            let k = rng.gen_range(0..n);
            (b, c) = mutate_extended(&b, &c, k);
            (bb, cb) = mutate_extended(&bb, &cb, k);
            steps += 1;
            let ok = conjugate(ed, &b).map(|x| x == bb).unwrap_or(false)
                && conjugate(ed, &c).map(|x| x == cb).unwrap_or(false);
            if !ok {
                bad.push(format!("word {w}, step {steps}, k={}", k + 1));
                continue 'words;
            }
        }
    }
    if bad.is_empty() {
        report.push("reduced", "conjugation_commutes", Status::Pass, format!("{words} words, {steps} mutations"));
    }
    for b in bad {
        report.push("reduced", "conjugation_commutes", Status::Fail, b);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::enumerate_fan;
    use crate::exec::Exec;
    use crate::quiver::ValuedQuiver;

    fn quat() -> EulerData {
        EulerData::new(&ValuedQuiver::from_json(include_str!("../../fixtures/b3_quat.json")).unwrap()).unwrap()
    }

    fn v(x: &[i64]) -> IntVector {
        IntVector(x.to_vec())
    }

    #[test]
    fn table_rows() {
        let ed = quat();
        assert_eq!(ed.z, vec![2, 1, 1]);
        let z = z_beta(&ed, &v(&[1, 2, 2]), None).unwrap();
        assert_eq!(z, 2);
        assert_eq!(beta_bar(&ed, &v(&[1, 2, 2]), z).unwrap(), v(&[1, 1, 1]));
        let z = z_beta(&ed, &v(&[1, 1, 0]), None).unwrap();
        assert_eq!(z, 1);
        assert_eq!(beta_bar(&ed, &v(&[1, 1, 0]), z).unwrap(), v(&[2, 1, 0]));
    }

    #[test]
    fn trivial_z_is_identity() {
        let ed = EulerData::new(&ValuedQuiver::simply_laced("a3", 3, &[(2, 1), (3, 2)]).unwrap()).unwrap();
        assert_eq!(ed.b_reduced, ed.b);
        assert_eq!(beta_bar(&ed, &v(&[1, 1, 1]), 1).unwrap(), v(&[1, 1, 1]));
    }

    #[test]
    fn ambiguity_is_reported() {
        let text = r#"{"name":"amb","vertices":[{"f":2,"n_red":1},{"f":2,"n_red":2}],"arrows":[]}"#;
        let ed = EulerData::new(&ValuedQuiver::from_json(text).unwrap()).unwrap();
        assert!(matches!(z_beta(&ed, &v(&[1, 0]), None), Err(Error::AmbiguousEndoClass { .. })));
        assert_eq!(z_beta(&ed, &v(&[1, 0]), Some(2)).unwrap(), 2);
    }

    #[test]
    fn quat_fan_and_words() {
        let ed = quat();
        let fan = enumerate_fan(&ed, 1000, Exec::Sequential).unwrap();
        let rep = reduced_fan_check(&ed, &fan);
        assert!(rep.passed(), "{}", rep.to_tsv());
        assert!(conjugation_commutes(&ed, 100, 20, 7).passed());
    }
}
