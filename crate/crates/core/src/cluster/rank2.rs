//! Rank-2 hereditary algebras: preprojective and preinjective dimension
//! vectors, the map `ρ` on pairs `(γ, U)`, and the consecutive-root formula.
//!
//! The vertex order follows `F_1 <- F_2`: `dim P_1 = (1, 0)`,
//! `dim P_2 = (d_1, 1)`, `dim I_1 = (1, d_2)`, `dim I_2 = (0, 1)`, and the
//! Euler matrix is `[[f_1, 0], [-m, f_2]]`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, IntVector};
use crate::report::{Report, Status};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank2State {
    pub d: [i64; 2],
    pub f: [i64; 2],
    pub m: i64,
    /// `dim Y_1, dim Y_2, ...`
    pub y: Vec<IntVector>,
    /// `dim Z_1, dim Z_2, ...`
    pub z: Vec<IntVector>,
    /// Number of indecomposables, `None` for infinite type.
    pub s: Option<usize>,
    /// Whether both recursions left `N²`.
    pub terminated: bool,
}

/// Objects of the transjective component of the cluster category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Obj {
    Y(usize),
    Z(usize),
    /// `Y_1[1]` or `Y_2[1]`.
    Shift(usize),
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obj::Y(i) => write!(f, "Y{i}"),
            Obj::Z(j) => write!(f, "Z{j}"),
            Obj::Shift(i) => write!(f, "Y{i}[1]"),
        }
    }
}

pub type Pair = (IntVector, Obj);

/// Count of indecomposables by `d_1 d_2`.
pub fn indecomposable_count(d1: i64, d2: i64) -> Option<usize> {
    match d1 * d2 {
        0 => Some(2),
        1 => Some(3),
        2 => Some(4),
        3 => Some(6),
        _ => None,
    }
}

fn d_at(d: [i64; 2], k: usize) -> i64 {
    if k % 2 == 1 {
        d[0]
    } else {
        d[1]
    }
}

/// Runs `Y_i = d_{i-1} Y_{i-1} - Y_{i-2}` and `Z_j = d_j Z_{j-1} - Z_{j-2}`
/// (subscripts of `d` mod 2) at most `steps` times each, stopping early
/// when a vector leaves `N²`.
pub fn rank2_sequences(d1: i64, d2: i64, f1: i64, f2: i64, steps: usize) -> Result<Rank2State> {
    if d1 < 0 || d2 < 0 || f1 <= 0 || f2 <= 0 || f1 * d1 != f2 * d2 {
        return Err(Error::Parse(format!("rank-2 data needs f1*d1 = f2*d2, got d=({d1},{d2}) f=({f1},{f2})")));
    }
    let d = [d1, d2];
    let run = |first: IntVector, second: IntVector, shift: usize| {
        let mut out = vec![first, second];
        let mut left = false;
        for _ in 0..steps {
            let i = out.len() + 1;
            let next = out[i - 2].scale(d_at(d, i - shift)).sub(&out[i - 3]);
            if !next.is_nonnegative() {
                left = true;
                break;
            }
            out.push(next);
        }
        (out, left)
    };
    let (y, ly) = run(IntVector(vec![1, 0]), IntVector(vec![d1, 1]), 1);
    let (z, lz) = run(IntVector(vec![0, 1]), IntVector(vec![1, d2]), 0);
    Ok(Rank2State { d, f: [f1, f2], m: f1 * d1, y, z, s: indecomposable_count(d1, d2), terminated: ly && lz })
}

impl Rank2State {
    pub fn euler_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&[vec![self.f[0], 0], vec![-self.m, self.f[1]]])
    }

    pub fn pair(&self, x: &IntVector, y: &IntVector) -> i64 {
        x.dot(&self.euler_matrix().mul_vec(y))
    }

    pub fn dim(&self, o: Obj) -> IntVector {
        match o {
            Obj::Y(i) => self.y[i - 1].clone(),
            Obj::Z(j) => self.z[j - 1].clone(),
            Obj::Shift(i) => self.y[i - 1].neg(),
        }
    }

    fn has(&self, o: Obj) -> bool {
        match o {
            Obj::Y(i) => i >= 1 && i <= self.y.len(),
            Obj::Z(j) => j >= 1 && j <= self.z.len(),
            Obj::Shift(i) => i == 1 || i == 2,
        }
    }

    /// In finite type `Z_j = Y_{s-j+1}`; labels are normalized to `Y`.
    pub fn normalize(&self, o: Obj) -> Obj {
        match (o, self.s) {
            (Obj::Z(j), Some(s)) if j <= s => Obj::Y(s - j + 1),
            _ => o,
        }
    }

    fn forward_table(&self) -> Vec<(Pair, Pair)> {
        let g = |o: Obj| self.dim(o);
        let mut out = Vec::new();
        let zmax = self.s.map_or(self.z.len(), |s| s);
        let ymax = self.s.map_or(self.y.len(), |s| s);
        for j in 1..=zmax.saturating_sub(2) {
            let (a, b, c) = (Obj::Z(j + 2), Obj::Z(j + 1), Obj::Z(j));
            if self.has(a) {
                out.push(((g(a), b), (g(b), c)));
            }
        }
        if self.has(Obj::Z(2)) {
            out.push(((g(Obj::Z(2)), Obj::Z(1)), (g(Obj::Z(1)), Obj::Shift(1))));
        }
        let (y1, z1) = (g(Obj::Y(1)), g(Obj::Z(1)));
        out.push(((z1.clone(), Obj::Shift(1)), (y1.neg(), Obj::Shift(2))));
        out.push(((y1.neg(), Obj::Shift(2)), (z1.neg(), Obj::Y(1))));
        out.push(((z1.neg(), Obj::Y(1)), (y1.clone(), Obj::Y(2))));
        for i in 1..=ymax.saturating_sub(2) {
            let (a, b, c) = (Obj::Y(i), Obj::Y(i + 1), Obj::Y(i + 2));
            if self.has(c) {
                out.push(((g(a), b), (g(b), c)));
            }
        }
        out
    }

    /// All entries of `ρ`: the six-case forward list and its mirror
    /// `ρ(-γ', U') = (-γ, U)`, with labels normalized.
    pub fn rho_table(&self) -> Vec<(Pair, Pair)> {
        let norm = |(v, o): Pair| (v, self.normalize(o));
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b) in self.forward_table() {
            let (a, b) = (norm(a), norm(b));
            let mirror = ((b.0.neg(), b.1), (a.0.neg(), a.1));
            for entry in [(a, b), mirror] {
                if seen.insert(entry.0.clone()) {
                    out.push(entry);
                }
            }
        }
        out
    }

    pub fn rho(&self, pair: &Pair) -> Result<Pair> {
        let key = (pair.0.clone(), self.normalize(pair.1));
        self.rho_table()
            .into_iter()
            .find(|(a, _)| *a == key)
            .map(|(_, b)| b)
            .ok_or_else(|| Error::TheoremViolation(format!("({}, {}) is not in the rho table", pair.0, pair.1)))
    }

    /// Follows `ρ` from `start` until it returns or `max_len` pairs are
    /// collected. The flag is true when the orbit closed.
    pub fn orbit(&self, start: &Pair, max_len: usize) -> (Vec<Pair>, bool) {
        let table = self.rho_table();
        let start = (start.0.clone(), self.normalize(start.1));
        let mut out = vec![start.clone()];
        let mut cur = start.clone();
        while out.len() < max_len {
            let Some((_, next)) = table.iter().find(|(a, _)| *a == cur) else {
                return (out, false);
            };
            if *next == start {
                return (out, true);
            }
            out.push(next.clone());
            cur = next.clone();
        }
        (out, false)
    }

    /// The two consecutive-root sequences: one through `(dim Z_2, Z_1)`
    /// and one through `(-dim Y_1, Y_2)`.
    pub fn sequences(&self, max_len: usize) -> [(Vec<Pair>, bool); 2] {
        let s1 = (self.dim(Obj::Z(2)), Obj::Z(1));
        let s2 = (self.dim(Obj::Y(1)).neg(), Obj::Y(2));
        [self.orbit(&s1, max_len), self.orbit(&s2, max_len)]
    }

    /// `f_γ = ⟨|γ|, |γ|⟩`.
    pub fn endo_dim(&self, gamma: &IntVector) -> i64 {
        let a = gamma.abs();
        self.pair(&a, &a)
    }

    /// Lemma formula for the root following `γ, γ'`.
    pub fn next_root(&self, gamma: &IntVector, gamma_p: &IntVector) -> Result<(i64, IntVector)> {
        let f = self.endo_dim(gamma_p);
        let num = self.pair(gamma_p, gamma) - self.pair(gamma, gamma_p);
        if f <= 0 || num % f != 0 {
            return Err(Error::Integrality(format!("b for ({gamma}, {gamma_p})")));
        }
        let b = num / f;
        let sign = gamma_p.sign().unwrap_or(0);
        let next = if b * sign < 0 { gamma.neg().add(&gamma_p.scale(b.abs())) } else { gamma.neg() };
        Ok((b, next))
    }

    pub fn chart(&self) -> Vec<ChartRow> {
        let g = |o: Obj| self.dim(o);
        let rows = [
            (g(Obj::Z(3)), g(Obj::Z(2))),
            (g(Obj::Z(2)), g(Obj::Z(1))),
            (g(Obj::Z(1)), g(Obj::Y(1)).neg()),
            (g(Obj::Y(1)).neg(), g(Obj::Z(1)).neg()),
            (g(Obj::Z(1)).neg(), g(Obj::Y(1))),
            (g(Obj::Y(1)), g(Obj::Y(2))),
        ];
        rows.into_iter()
            .map(|(gamma, gamma_p)| {
                let (b, gamma_pp) = self.next_root(&gamma, &gamma_p).expect("chart rows are integral");
                ChartRow {
                    f: self.endo_dim(&gamma_p),
                    pair_pg: self.pair(&gamma_p, &gamma),
                    pair_gp: self.pair(&gamma, &gamma_p),
                    sign: (b * gamma_p.sign().unwrap_or(0)).signum(),
                    b,
                    gamma,
                    gamma_p,
                    gamma_pp,
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartRow {
    pub gamma: IntVector,
    pub gamma_p: IntVector,
    pub gamma_pp: IntVector,
    pub f: i64,
    /// `⟨γ', γ⟩`.
    pub pair_pg: i64,
    /// `⟨γ, γ'⟩`.
    pub pair_gp: i64,
    pub b: i64,
    pub sign: i64,
}

/// Walks both sequences and checks every consecutive triple against the
/// formula. Closed orbits are checked cyclically.
pub fn consecutive_formula_check(state: &Rank2State, max_len: usize) -> Report {
    let mut report = Report::new();
    for (idx, (orbit, closed)) in state.sequences(max_len).iter().enumerate() {
        let name = format!("sequence{}", idx + 1);
        let k = orbit.len();
        let triples = if *closed { k } else { k.saturating_sub(2) };
        let mut bad = Vec::new();
        for t in 0..triples {
            let (a, b, c) = (&orbit[t].0, &orbit[(t + 1) % k].0, &orbit[(t + 2) % k].0);
            match state.next_root(a, b) {
                Ok((_, next)) if next == *c => {}
                Ok((bv, next)) => bad.push(format!("({a}; {b}; {c}) b={bv} formula gives {next}")),
                Err(e) => bad.push(e.to_string()),
            }
        }
        if bad.is_empty() {
            let period = if *closed { format!("period {k}") } else { format!("{k} pairs, open") };
            report.push("rank2", name.clone(), Status::Pass, format!("{triples} triples, {period}"));
        }
        for e in bad {
            report.push("rank2", name.clone(), Status::Fail, e);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> IntVector {
        IntVector(x.to_vec())
    }

    #[test]
    fn a2_lists() {
        let st = rank2_sequences(1, 1, 1, 1, 10).unwrap();
        assert_eq!(st.s, Some(3));
        assert_eq!(&st.y[..2], &[v(&[1, 0]), v(&[1, 1])]);
        assert_eq!(&st.z[..2], &[v(&[0, 1]), v(&[1, 1])]);
        assert_eq!(st.y.len(), 3);
        assert!(st.terminated);
    }

    #[test]
    fn finite_lists_have_length_s_and_reverse() {
        for (d1, d2, f1, f2) in [(0, 0, 1, 1), (1, 1, 1, 1), (2, 1, 1, 2), (1, 2, 2, 1), (3, 1, 1, 3), (1, 3, 3, 1)] {
            let st = rank2_sequences(d1, d2, f1, f2, 50).unwrap();
            let s = st.s.unwrap();
            assert!(st.terminated);
            assert_eq!(st.y.len(), s);
            assert_eq!(st.z.len(), s);
            for j in 1..=s {
                assert_eq!(st.z[j - 1], st.y[s - j]);
            }
        }
    }

    #[test]
    fn b2_and_g2() {
        let b2 = rank2_sequences(2, 1, 1, 2, 50).unwrap();
        assert_eq!(b2.s, Some(4));
        assert_eq!(b2.y[1], v(&[2, 1]));
        assert_eq!(rank2_sequences(3, 1, 1, 3, 50).unwrap().s, Some(6));
    }

    #[test]
    fn wild_and_affine_do_not_terminate() {
        for (d1, d2) in [(2, 2), (4, 1), (3, 3)] {
            let st = rank2_sequences(d1, d2, d2, d1, 20).unwrap();
            assert_eq!(st.s, None);
            assert!(!st.terminated);
            assert_eq!(st.y.len(), 22);
        }
    }

    #[test]
    fn rho_cases() {
        let st = rank2_sequences(2, 1, 1, 2, 50).unwrap();
        let z1 = st.dim(Obj::Z(1));
        let y1 = st.dim(Obj::Y(1));
        assert_eq!(st.rho(&(z1.clone(), Obj::Shift(1))).unwrap(), (y1.neg(), Obj::Shift(2)));
        assert_eq!(st.rho(&(y1.neg(), Obj::Shift(2))).unwrap(), (z1.neg(), Obj::Y(1)));
        // mirror of (3)
        assert_eq!(st.rho(&(y1.clone(), Obj::Shift(2))).unwrap(), (z1.neg(), Obj::Shift(1)));
    }

    #[test]
    fn orbits_partition_and_cover_labels() {
        for (d1, d2, f1, f2) in [(1, 1, 1, 1), (2, 1, 1, 2), (1, 2, 2, 1), (3, 1, 1, 3)] {
            let st = rank2_sequences(d1, d2, f1, f2, 50).unwrap();
            let s = st.s.unwrap();
            let [(o1, c1), (o2, c2)] = st.sequences(100);
            assert!(c1 && c2);
            assert_eq!(o1.len(), s + 2);
            assert_eq!(o2.len(), s + 2);
            let all: BTreeSet<Pair> = o1.iter().chain(&o2).cloned().collect();
            assert_eq!(all.len(), 2 * (s + 2));
            assert_eq!(all.len(), st.rho_table().len());
            for o in [&o1, &o2] {
                let labels: BTreeSet<Obj> = o.iter().map(|p| p.1).collect();
                assert_eq!(labels.len(), s + 2);
            }
            assert!(consecutive_formula_check(&st, 100).passed());
        }
    }

    #[test]
    fn open_sequences_in_infinite_type_satisfy_formula() {
        let st = rank2_sequences(2, 2, 1, 1, 12).unwrap();
        let rep = consecutive_formula_check(&st, 40);
        assert!(rep.passed(), "{}", rep.to_tsv());
    }

    #[test]
    fn chart_values_at_b2() {
        let st = rank2_sequences(2, 1, 1, 2, 50).unwrap();
        let rows = st.chart();
        let (d1, d2, f1, f2) = (2, 1, 1, 2);
        let expect_b = [-d1, -d2, -d1, -d2, -d1, -d2];
        let expect_f = [f1, f2, f1, f2, f1, f2];
        let expect_sign = [-1, -1, 1, 1, -1, -1];
        for (k, r) in rows.iter().enumerate() {
            assert_eq!((r.b, r.f, r.sign), (expect_b[k], expect_f[k], expect_sign[k]), "row {}", k + 1);
        }
        assert_eq!(rows[4].gamma_pp, st.dim(Obj::Y(2)));
        assert_eq!(rows[2].gamma_pp, st.dim(Obj::Z(1)).neg());
    }
}
