//! Stability domains `D(β)`: the semistability description via subroots and
//! the generator description `Δ(β)` via perpendicular simples and
//! projectives at the zero coordinates of `β`.
//!
//! Membership in `Δ(β)` is decided exactly in the coordinates of the
//! unimodular basis `(β, E_1, ..., E_{n-1})`. Every `dim P_j` with `β_j = 0`
//! lies in the perpendicular category, so its `β`-coordinate vanishes and its
//! `E`-coordinates are nonnegative. Adding integer multiples of the `P_j`
//! therefore lets any coordinate in the union of their supports go negative,
//! while the remaining coordinates must stay nonnegative.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{IntMatrix, IntVector};
use crate::oracle::OracleSession;
use crate::quiver::{EulerData, ValuedQuiver};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    OracleCertified { q: u64, seed: u64 },
    UserAttested { source: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::OracleCertified { q, seed } => write!(f, "oracle q={q} seed={seed}"),
            Provenance::UserAttested { source } => write!(f, "user-attested: {source}"),
        }
    }
}

/// `α = Σ k_i E_i + Σ ℓ_j P_j` with `k_i ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub k: Vec<i64>,
    pub l: Vec<i64>,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k: Vec<String> = self.k.iter().map(|x| x.to_string()).collect();
        let l: Vec<String> = self.l.iter().map(|x| x.to_string()).collect();
        write!(f, "k=({});l=({})", k.join(","), l.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct StabilityDomain {
    pub beta: IntVector,
    pub subroots: Vec<IntVector>,
    pub perp_simples: Vec<IntVector>,
    pub j_set: Vec<usize>,
    pub proj_gens: Vec<IntVector>,
    pub provenance: Provenance,
    e: IntMatrix,
    basis_inv: IntMatrix,
    proj_coords: Vec<IntVector>,
    support_sum: Vec<i64>,
}

impl StabilityDomain {
    pub fn new(
        ed: &EulerData,
        beta: IntVector,
        subroots: Vec<IntVector>,
        perp_simples: Vec<IntVector>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = ed.n();
        let bad = |msg: String| Err(Error::TheoremViolation(format!("domain of {beta:?}: {msg}")));
        if !subroots.contains(&beta) {
            return bad("subroot list lacks beta".into());
        }
        if perp_simples.len() + 1 != n {
            return Err(Error::CountMismatch { beta, expected: n - 1, found: perp_simples.len() });
        }
        for e in &perp_simples {
            if ed.pair(e, &beta) != 0 {
                return bad(format!("⟨{e:?}, β⟩ ≠ 0"));
            }
        }
        let j_set: Vec<usize> = (0..n).filter(|&j| beta.0[j] == 0).collect();
        let proj_gens: Vec<IntVector> = j_set.iter().map(|&j| ed.projective(j)).collect();
        for p in &proj_gens {
            for s in &subroots {
                if ed.pair(p, s) != 0 {
                    return bad(format!("⟨{p:?}, {s:?}⟩ ≠ 0"));
                }
            }
        }
        let mut cols = vec![beta.clone()];
        cols.extend(perp_simples.iter().cloned());
        let basis_inv = IntMatrix::from_columns(&cols)
            .integral_inverse()
            .ok_or_else(|| Error::TheoremViolation(format!("(β, E) not unimodular for {beta:?}")))?;
        let mut proj_coords = Vec::new();
        let mut support_sum = vec![0i64; n - 1];
        for p in &proj_gens {
            let c = basis_inv.mul_vec(p);
            if c.0[0] != 0 || !c.0[1..].iter().all(|&x| x >= 0) {
                return bad(format!("projective {p:?} has coordinates {c:?}"));
            }
            let ec = IntVector(c.0[1..].to_vec());
            for (s, x) in support_sum.iter_mut().zip(&ec.0) {
                *s += x;
            }
            proj_coords.push(ec);
        }
        Ok(StabilityDomain {
            beta,
            subroots,
            perp_simples,
            j_set,
            proj_gens,
            provenance,
            e: ed.e.clone(),
            basis_inv,
            proj_coords,
            support_sum,
        })
    }

    pub fn from_oracle(session: &OracleSession, beta: &IntVector) -> Result<Self> {
        let subroots = session.subroots(beta)?;
        let perp = session.perp_simples(beta)?;
        let prov = Provenance::OracleCertified { q: session.tower.q(), seed: session.seed };
        Self::new(&session.ed, beta.clone(), subroots, perp, prov)
    }

    fn pair(&self, x: &IntVector, y: &IntVector) -> i64 {
        x.dot(&self.e.mul_vec(y))
    }

    pub fn dzss_contains(&self, alpha: &IntVector) -> bool {
        self.pair(alpha, &self.beta) == 0 && self.subroots.iter().all(|s| self.pair(alpha, s) <= 0)
    }

    pub fn interior_contains(&self, alpha: &IntVector) -> bool {
        self.pair(alpha, &self.beta) == 0
            && self.subroots.iter().filter(|s| **s != self.beta).all(|s| self.pair(alpha, s) < 0)
    }

    /// Coordinates of `α` in `(β, E_1, ..., E_{n-1})`.
    pub fn coordinates(&self, alpha: &IntVector) -> IntVector {
        self.basis_inv.mul_vec(alpha)
    }

    /// Membership in `Δ⁺(β)`, the nonnegative span of the `E_i`.
    pub fn delta_plus_contains(&self, alpha: &IntVector) -> bool {
        let c = self.coordinates(alpha);
        c.0[0] == 0 && c.0[1..].iter().all(|&x| x >= 0)
    }

    /// Exact membership in `Δ(β)`, with the certificate using the smallest
    /// uniform shift `ℓ_j = -N`.
    pub fn delta_contains(&self, alpha: &IntVector) -> Option<Certificate> {
        let c = self.coordinates(alpha);
        if c.0[0] != 0 {
            return None;
        }
        let a = &c.0[1..];
        let mut shift = 0i64;
        for (&ai, &si) in a.iter().zip(&self.support_sum) {
            if ai >= 0 {
                continue;
            }
            if si == 0 {
                return None;
            }
            shift = shift.max((-ai + si - 1) / si);
        }
        let k = a.iter().zip(&self.support_sum).map(|(&ai, &si)| ai + shift * si).collect();
        Some(Certificate { k, l: vec![-shift; self.proj_gens.len()] })
    }

    pub fn expand(&self, cert: &Certificate) -> IntVector {
        let n = self.beta.len();
        let mut out = IntVector::zeros(n);
        for (k, e) in cert.k.iter().zip(&self.perp_simples) {
            out = out.add(&e.scale(*k));
        }
        for (l, p) in cert.l.iter().zip(&self.proj_gens) {
            out = out.add(&p.scale(*l));
        }
        out
    }

    /// `E`-coordinates of each projective generator.
    pub fn proj_coords(&self) -> &[IntVector] {
        &self.proj_coords
    }
}

/// Every point of `[-r, r]^n` in lexicographic order.
pub fn lattice_box(n: usize, r: i64) -> Vec<IntVector> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut v = vec![0i64; n];
            for x in v.iter_mut().rev() {
                *x = (code % side) as i64 - r;
                code /= side;
            }
            IntVector(v)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxPoint {
    pub alpha: IntVector,
    pub in_dzss: bool,
    pub in_delta: bool,
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub beta: IntVector,
    pub radius: i64,
    pub provenance: Provenance,
    pub points: Vec<BoxPoint>,
}

impl StabilityReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &BoxPoint> {
        self.points.iter().filter(|p| p.in_dzss != p.in_delta)
    }

    pub fn members(&self) -> usize {
        self.points.iter().filter(|p| p.in_delta).count()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# beta\t{}\n# radius\t{}\n# subroots\t{}\n", self.beta, self.radius, self.provenance);
        out.push_str("alpha\tin_dzss\tin_delta\tcertificate\n");
        for p in &self.points {
            let cert = p.certificate.as_ref().map_or("-".to_string(), |c| c.to_string());
            out.push_str(&format!("{}\t{}\t{}\t{}\n", p.alpha, p.in_dzss, p.in_delta, cert));
        }
        out
    }
}

/// Compares both descriptions on every point of the box.
pub fn verify_stability_theorem(domain: &StabilityDomain, radius: i64, exec: Exec) -> StabilityReport {
    let pts = lattice_box(domain.beta.len(), radius);
    let points = exec.map(&pts, |alpha| {
        let certificate = domain.delta_contains(alpha);
        BoxPoint {
            alpha: alpha.clone(),
            in_dzss: domain.dzss_contains(alpha),
            in_delta: certificate.is_some(),
            certificate,
        }
    });
    StabilityReport { beta: domain.beta.clone(), radius, provenance: domain.provenance.clone(), points }
}

/// Oracle-built domains for every root of the session.
pub fn oracle_domains(session: &OracleSession, exec: Exec) -> Result<BTreeMap<IntVector, StabilityDomain>> {
    let roots = session.roots().to_vec();
    let built = exec.map(&roots, |b| StabilityDomain::from_oracle(session, b));
    roots.into_iter().zip(built).map(|(b, d)| d.map(|d| (b, d))).collect()
}

/// User-supplied subroot and perpendicular-simple lists.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubrootOverride {
    pub provenance: String,
    pub domains: Vec<OverrideEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OverrideEntry {
    pub beta: IntVector,
    pub subroots: Vec<IntVector>,
    pub perp_simples: Vec<IntVector>,
}

impl SubrootOverride {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn domains(&self, ed: &EulerData) -> Result<BTreeMap<IntVector, StabilityDomain>> {
        self.domains
            .iter()
            .map(|e| {
                let prov = Provenance::UserAttested { source: self.provenance.clone() };
                StabilityDomain::new(ed, e.beta.clone(), e.subroots.clone(), e.perp_simples.clone(), prov)
                    .map(|d| (e.beta.clone(), d))
            })
            .collect()
    }

    pub fn from_domains(provenance: &str, domains: &BTreeMap<IntVector, StabilityDomain>) -> Self {
        SubrootOverride {
            provenance: provenance.into(),
            domains: domains
                .values()
                .map(|d| OverrideEntry {
                    beta: d.beta.clone(),
                    subroots: d.subroots.clone(),
                    perp_simples: d.perp_simples.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DeletedVertexReport {
    pub beta: IntVector,
    pub vertex: usize,
    pub checked: usize,
    pub mismatches: Vec<IntVector>,
}

/// Checks `D(Q, β) = D(Q_(j), β) + Z dim P_j` on a box, with the domain on
/// `Q_(j)` computed by an independent oracle session on the smaller quiver.
pub fn deleted_vertex_check(
    q: &ValuedQuiver,
    order: u64,
    seed: u64,
    beta: &IntVector,
    j: usize,
    radius: i64,
    exec: Exec,
) -> Result<DeletedVertexReport> {
    use crate::braid::{enumerate_roots, Caps};
    if beta.0[j] != 0 {
        return Err(Error::Precondition { beta: beta.clone() });
    }
    let ed = EulerData::new(q)?;
    let roots = enumerate_roots(q, &ed, Caps::default())?;
    let full = OracleSession::new(q, order, &roots, seed, exec)?;
    let dom = StabilityDomain::from_oracle(&full, beta)?;

    let qd = q.delete_vertex(j);
    let edd = EulerData::new(&qd)?;
    let rootsd = enumerate_roots(&qd, &edd, Caps::default())?;
    let small = OracleSession::new(&qd, order, &rootsd, seed, exec)?;
    let restrict =
        |v: &IntVector| IntVector(v.0.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, &x)| x).collect());
    let beta_d = restrict(beta);
    let subroots_d = small.subroots(&beta_d)?;
    let pj = ed.projective(j);

    let pts = lattice_box(q.n(), radius);
    let results = exec.map(&pts, |alpha| {
        let lhs = dom.dzss_contains(alpha);
        let rest = restrict(&alpha.sub(&pj.scale(alpha.0[j])));
        let rhs = edd.pair(&rest, &beta_d) == 0 && subroots_d.iter().all(|s| edd.pair(&rest, s) <= 0);
        lhs == rhs
    });
    let mismatches = pts.iter().zip(results).filter(|(_, ok)| !ok).map(|(a, _)| a.clone()).collect();
    Ok(DeletedVertexReport { beta: beta.clone(), vertex: j, checked: pts.len(), mismatches })
}
