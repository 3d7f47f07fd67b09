//! Valued quivers, their Euler matrices and the Euler-Ringel form.
//!
//! A vertex `i` carries `f_i = dim_K F_i` and the reduced degree `n_red_i`;
//! an arrow `i -> j` carries `d_ij` (dimension over the target field) and
//! `d_ji` (dimension over the source field). Vertices are 1-based in files
//! and 0-based in memory.

use std::fmt;
use std::path::Path;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, IntVector};

/// Raw file contents before validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub name: String,
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub f: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_red: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub source: usize,
    pub target: usize,
    pub d_st: i64,
    pub d_ts: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NonPositiveF,
    NonPositiveReducedDegree,
    ReducedDegreeNotDivisor,
    VertexOutOfRange,
    Loop,
    NotAdmissible,
    DuplicateArrow,
    NonPositiveValuation,
    ValuationMismatch,
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Quiver,
    Vertex(usize),
    Arrow(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            let loc = match v.location {
                Location::Quiver => "quiver".to_string(),
                Location::Vertex(i) => format!("vertex {}", i + 1),
                Location::Arrow(a) => format!("arrow {}", a + 1),
            };
            writeln!(f, "{loc}: {:?}: {}", v.kind, v.message)?;
        }
        Ok(())
    }
}

/// Checks every structural invariant and reports all failures.
pub fn validate(spec: &QuiverSpec) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |kind, location, message: String| out.push(Violation { kind, location, message });
    let n = spec.vertices.len();
    if n == 0 {
        push(ViolationKind::Empty, Location::Quiver, "no vertices".into());
    }
    for (i, v) in spec.vertices.iter().enumerate() {
        if v.f < 1 {
            push(ViolationKind::NonPositiveF, Location::Vertex(i), format!("f = {}", v.f));
            continue;
        }
        if let Some(nr) = v.n_red {
            if nr < 1 {
                push(ViolationKind::NonPositiveReducedDegree, Location::Vertex(i), format!("n_red = {nr}"));
            } else if v.f % nr != 0 {
                push(
                    ViolationKind::ReducedDegreeNotDivisor,
                    Location::Vertex(i),
                    format!("n_red = {nr} does not divide f = {}", v.f),
                );
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for (a, arr) in spec.arrows.iter().enumerate() {
        let loc = Location::Arrow(a);
        let in_range = |x: usize| x >= 1 && x <= n;
        if !in_range(arr.source) || !in_range(arr.target) {
            push(ViolationKind::VertexOutOfRange, loc, format!("{} -> {} outside 1..{n}", arr.source, arr.target));
            continue;
        }
        if arr.source == arr.target {
            push(ViolationKind::Loop, loc, format!("loop at {}", arr.source));
            continue;
        }
        if arr.source < arr.target {
            push(
                ViolationKind::NotAdmissible,
                loc.clone(),
                format!("{} -> {} must decrease the vertex index", arr.source, arr.target),
            );
        }
        let key = (arr.source.min(arr.target), arr.source.max(arr.target));
        if !seen.insert(key) {
            push(
                ViolationKind::DuplicateArrow,
                loc.clone(),
                format!("second arrow between {} and {}; fold multiplicities into d", key.0, key.1),
            );
        }
        if arr.d_st < 1 || arr.d_ts < 1 {
            push(ViolationKind::NonPositiveValuation, loc, format!("(d_st, d_ts) = ({}, {})", arr.d_st, arr.d_ts));
            continue;
        }
        let fs = spec.vertices[arr.source - 1].f;
        let ft = spec.vertices[arr.target - 1].f;
        if arr.d_st * ft != fs * arr.d_ts {
            push(
                ViolationKind::ValuationMismatch,
                loc,
                format!("d_st*f_t = {}*{} != f_s*d_ts = {}*{}", arr.d_st, ft, fs, arr.d_ts),
            );
        }
    }
    ValidationReport { violations: out }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub f: i64,
    pub n_red: i64,
}

impl Vertex {
    pub fn z(&self) -> i64 {
        self.f / self.n_red
    }
}

/// Arrow with 0-based endpoints. `d_st` is `d_ij` for `i = source`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub d_st: i64,
    pub d_ts: i64,
}

/// A validated valued quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedQuiver {
    name: String,
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
}

impl ValuedQuiver {
    pub fn new(spec: &QuiverSpec) -> Result<Self> {
        let report = validate(spec);
        if !report.is_ok() {
            return Err(Error::Invalid(report));
        }
        Ok(ValuedQuiver {
            name: spec.name.clone(),
            vertices: spec.vertices.iter().map(|v| Vertex { f: v.f, n_red: v.n_red.unwrap_or(v.f) }).collect(),
            arrows: spec
                .arrows
                .iter()
                .map(|a| Arrow { source: a.source - 1, target: a.target - 1, d_st: a.d_st, d_ts: a.d_ts })
                .collect(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: QuiverSpec = serde_json::from_str(text)?;
        Self::new(&spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Trivially valued quiver on `n` vertices from 1-based arrow pairs.
    pub fn simply_laced(name: &str, n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        Self::new(&QuiverSpec {
            name: name.into(),
            vertices: vec![VertexSpec { f: 1, n_red: None }; n],
            arrows: arrows.iter().map(|&(s, t)| ArrowSpec { source: s, target: t, d_st: 1, d_ts: 1 }).collect(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn f(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| v.f).collect()
    }

    pub fn z(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| v.z()).collect()
    }

    /// Spec form with defaults filled in, used for hashing.
    pub fn to_spec(&self) -> QuiverSpec {
        QuiverSpec {
            name: self.name.clone(),
            vertices: self.vertices.iter().map(|v| VertexSpec { f: v.f, n_red: Some(v.n_red) }).collect(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowSpec { source: a.source + 1, target: a.target + 1, d_st: a.d_st, d_ts: a.d_ts })
                .collect(),
        }
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn canonical_hash(&self) -> String {
        let json = serde_json::to_string(&self.to_spec()).expect("serializable");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Quiver with vertex `j` removed, indices above `j` shifted down.
    pub fn delete_vertex(&self, j: usize) -> ValuedQuiver {
        let shift = |x: usize| if x > j { x - 1 } else { x };
        ValuedQuiver {
            name: format!("{}-del{}", self.name, j + 1),
            vertices: self.vertices.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v.clone()).collect(),
            arrows: self
                .arrows
                .iter()
                .filter(|a| a.source != j && a.target != j)
                .map(|a| Arrow { source: shift(a.source), target: shift(a.target), ..*a })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerData {
    pub e: IntMatrix,
    pub l: IntMatrix,
    pub r: IntMatrix,
    pub d: Vec<i64>,
    pub z: Vec<i64>,
    pub n_red: Vec<i64>,
    pub b: IntMatrix,
    pub b_reduced: IntMatrix,
    pub p: IntMatrix,
}

impl EulerData {
    pub fn new(q: &ValuedQuiver) -> Result<Self> {
        let n = q.n();
        let d = q.f();
        let z = q.z();
        let n_red: Vec<i64> = q.vertices().iter().map(|v| v.n_red).collect();
        let mut l = IntMatrix::identity(n);
        let mut r = IntMatrix::identity(n);
        for a in q.arrows() {
            l.set(a.source, a.target, -a.d_st);
            r.set(a.source, a.target, -a.d_ts);
        }
        let dm = IntMatrix::diagonal(&d);
        let e = l.mul(&dm);
        let b = l.transpose().sub(&r);
        let p = l.integral_inverse().expect("unitriangular matrices are unimodular");
        let mut b_reduced = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let num = b.get(i, j) * z[i];
                if num % z[j] != 0 {
                    return Err(Error::Integrality(format!(
                        "reduced exchange matrix entry ({}, {}) = {num}/{}",
                        i + 1,
                        j + 1,
                        z[j]
                    )));
                }
                b_reduced.set(i, j, num / z[j]);
            }
        }
        Ok(EulerData { e, l, r, d, z, n_red, b, b_reduced, p })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn d_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.d)
    }

    /// Row `i` of `P`, the dimension vector of the projective cover of `S_i`.
    pub fn projective(&self, i: usize) -> IntVector {
        self.p.row(i)
    }

    /// `⟨x, y⟩ = xᵗ E y`.
    pub fn euler_form(&self, x: &IntVector, y: &IntVector) -> Result<i64> {
        let n = self.n();
        for v in [x, y] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        Ok(x.dot(&self.e.mul_vec(y)))
    }

    /// Panicking variant for internal call sites with known lengths.
    pub fn pair(&self, x: &IntVector, y: &IntVector) -> i64 {
        self.euler_form(x, y).expect("vector length")
    }

    pub fn symmetrized_form(&self, x: &IntVector, y: &IntVector) -> Result<i64> {
        Ok(self.euler_form(x, y)? + self.euler_form(y, x)?)
    }

    /// `x - (sym(x, β) / ⟨β, β⟩) β`.
    pub fn reflect(&self, beta: &IntVector, x: &IntVector) -> Result<IntVector> {
        let bb = self.euler_form(beta, beta)?;
        let s = self.symmetrized_form(x, beta)?;
        if bb <= 0 || s % bb != 0 {
            return Err(Error::NonExceptionalAxis { beta: beta.clone() });
        }
        Ok(x.sub(&beta.scale(s / bb)))
    }

    /// Positive definiteness of `E + Eᵗ` via exact leading minors.
    pub fn is_positive_definite(&self) -> bool {
        let sym = self.e.add(&self.e.transpose());
        sym.leading_minors().iter().all(|m| m.is_positive())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g2ish_spec(d12: i64) -> QuiverSpec {
        QuiverSpec {
            name: "g2ish".into(),
            vertices: vec![VertexSpec { f: 2, n_red: None }, VertexSpec { f: 3, n_red: None }],
            arrows: vec![ArrowSpec { source: 2, target: 1, d_st: 3, d_ts: d12 }],
        }
    }

    #[test]
    fn valuation_equality_enforced() {
        assert!(validate(&g2ish_spec(2)).is_ok());
        let rep = validate(&g2ish_spec(3));
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].kind, ViolationKind::ValuationMismatch);
        assert_eq!(rep.violations[0].location, Location::Arrow(0));
    }

    #[test]
    fn single_quaternion_vertex() {
        let spec = QuiverSpec { name: "h".into(), vertices: vec![VertexSpec { f: 4, n_red: Some(2) }], arrows: vec![] };
        let q = ValuedQuiver::new(&spec).unwrap();
        assert_eq!(q.z(), vec![2]);
    }

    #[test]
    fn rejects_every_violation_without_repair() {
        let spec = QuiverSpec {
            name: "bad".into(),
            vertices: vec![VertexSpec { f: 2, n_red: Some(3) }, VertexSpec { f: 0, n_red: None }],
            arrows: vec![
                ArrowSpec { source: 1, target: 2, d_st: 1, d_ts: 1 },
                ArrowSpec { source: 2, target: 1, d_st: 1, d_ts: 1 },
                ArrowSpec { source: 3, target: 1, d_st: 1, d_ts: 1 },
            ],
        };
        let kinds: Vec<_> = validate(&spec).violations.into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::ReducedDegreeNotDivisor));
        assert!(kinds.contains(&ViolationKind::NonPositiveF));
        assert!(kinds.contains(&ViolationKind::NotAdmissible));
        assert!(kinds.contains(&ViolationKind::DuplicateArrow));
        assert!(kinds.contains(&ViolationKind::VertexOutOfRange));
    }

    #[test]
    fn no_arrows_gives_identities() {
        let q = ValuedQuiver::simply_laced("a1a1", 2, &[]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        let id = IntMatrix::identity(2);
        assert_eq!(ed.e, id);
        assert_eq!(ed.l, id);
        assert_eq!(ed.r, id);
        assert_eq!(ed.p, id);
        assert_eq!(ed.b, IntMatrix::zeros(2, 2));
    }

    #[test]
    fn a2_reflection() {
        let q = ValuedQuiver::simply_laced("a2", 2, &[(2, 1)]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        let e1 = IntVector::unit(2, 0);
        let e2 = IntVector::unit(2, 1);
        assert_eq!(ed.symmetrized_form(&e2, &e1).unwrap(), -1);
        assert_eq!(ed.reflect(&e1, &e2).unwrap(), IntVector(vec![1, 1]));
        assert_eq!(ed.reflect(&e1, &e1).unwrap(), e1.neg());
        assert!(matches!(ed.reflect(&IntVector::zeros(2), &e1), Err(Error::NonExceptionalAxis { .. })));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let q = ValuedQuiver::simply_laced("a2", 2, &[(2, 1)]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        assert!(matches!(
            ed.euler_form(&IntVector::zeros(3), &IntVector::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reduced_matrix_integrality_failure() {
        // z = (2, 1) with d = (1, 1) gives a half-integer entry.
        let spec = QuiverSpec {
            name: "bad-z".into(),
            vertices: vec![VertexSpec { f: 2, n_red: Some(1) }, VertexSpec { f: 2, n_red: None }],
            arrows: vec![ArrowSpec { source: 2, target: 1, d_st: 1, d_ts: 1 }],
        };
        let q = ValuedQuiver::new(&spec).unwrap();
        assert!(matches!(EulerData::new(&q), Err(Error::Integrality(_))));
    }

    #[test]
    fn deleting_a_vertex_reindexes_arrows() {
        let q = ValuedQuiver::simply_laced("a3", 3, &[(2, 1), (3, 2)]).unwrap();
        let d = q.delete_vertex(0);
        assert_eq!(d.n(), 2);
        assert_eq!(d.arrows(), &[Arrow { source: 1, target: 0, d_st: 1, d_ts: 1 }]);
    }

    fn vec3() -> impl Strategy<Value = IntVector> {
        proptest::collection::vec(-6i64..=6, 3).prop_map(IntVector)
    }

    fn b3() -> EulerData {
        let spec = QuiverSpec {
            name: "b3".into(),
            vertices: vec![
                VertexSpec { f: 2, n_red: None },
                VertexSpec { f: 1, n_red: None },
                VertexSpec { f: 1, n_red: None },
            ],
            arrows: vec![
                ArrowSpec { source: 2, target: 1, d_st: 1, d_ts: 2 },
                ArrowSpec { source: 3, target: 2, d_st: 1, d_ts: 1 },
            ],
        };
        EulerData::new(&ValuedQuiver::new(&spec).unwrap()).unwrap()
    }

    proptest! {
        #[test]
        fn euler_form_is_bilinear(x in vec3(), y in vec3(), w in vec3(), c in -4i64..=4) {
            let ed = b3();
            prop_assert_eq!(ed.pair(&x.add(&w), &y), ed.pair(&x, &y) + ed.pair(&w, &y));
            prop_assert_eq!(ed.pair(&x, &y.add(&w)), ed.pair(&x, &y) + ed.pair(&x, &w));
            prop_assert_eq!(ed.pair(&x.scale(c), &y), c * ed.pair(&x, &y));
        }

        #[test]
        fn reflection_is_involutive_isometry(x in vec3(), y in vec3(), k in 0usize..3) {
            let ed = b3();
            let beta = IntVector::unit(3, k);
            if let (Ok(rx), Ok(ry)) = (ed.reflect(&beta, &x), ed.reflect(&beta, &y)) {
                prop_assert_eq!(ed.reflect(&beta, &rx).unwrap(), x.clone());
                prop_assert_eq!(ed.symmetrized_form(&rx, &ry).unwrap(), ed.symmetrized_form(&x, &y).unwrap());
            }
        }
    }
}
