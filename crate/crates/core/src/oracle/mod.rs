//! Finite-field representation oracle.
//!
//! Realizes a valued quiver with all `z_i = 1` over `F_q` and computes
//! genuine Hom and Ext spaces, exceptional modules, subroots, perpendicular
//! simples and determinantal semi-invariants. Every combinatorial module in
//! the crate is cross-checked against it.

pub mod exceptional;
pub mod fpmat;
pub mod gf;
pub mod rep;
pub mod semiinv;
pub mod tower;

use std::collections::BTreeMap;

use crate::braid::{RootSequence, RootSet};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::IntVector;
use crate::quiver::{EulerData, ValuedQuiver};

pub use exceptional::{build_exceptional, is_subroot, DEFAULT_BUDGET};
pub use rep::{hom_ext, ModulatedRep, RepMorphism};
pub use tower::FieldTower;

/// Stable per-root seed derived from the session seed.
pub fn root_seed(seed: u64, beta: &IntVector) -> u64 {
    beta.0.iter().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, &x| (h ^ x as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// A tower together with one exceptional module per real Schur root.
pub struct OracleSession {
    pub tower: FieldTower,
    pub ed: EulerData,
    pub seed: u64,
    roots: Vec<IntVector>,
    modules: BTreeMap<IntVector, ModulatedRep>,
}

impl OracleSession {
    pub fn new(q: &ValuedQuiver, order: u64, roots: &RootSet, seed: u64, exec: Exec) -> Result<Self> {
        let tower = FieldTower::build(q, order)?;
        let ed = EulerData::new(q)?;
        let list = roots.sorted();
        let built = exec.map(&list, |beta| {
            build_exceptional(&tower, &ed, beta, root_seed(seed, beta), DEFAULT_BUDGET, Exec::Sequential)
        });
        let mut modules = BTreeMap::new();
        for (beta, m) in list.iter().zip(built) {
            modules.insert(beta.clone(), m?);
        }
        Ok(OracleSession { tower, ed, seed, roots: list, modules })
    }

    pub fn roots(&self) -> &[IntVector] {
        &self.roots
    }

    pub fn module(&self, beta: &IntVector) -> Option<&ModulatedRep> {
        self.modules.get(beta)
    }

    fn require(&self, beta: &IntVector) -> Result<&ModulatedRep> {
        self.module(beta).ok_or_else(|| Error::Inconclusive { beta: beta.clone() })
    }

    pub fn is_subroot(&self, sub: &IntVector, beta: &IntVector) -> Result<bool> {
        is_subroot(&self.tower, self.require(sub)?, self.require(beta)?, root_seed(self.seed, beta))
    }

    /// All real Schur subroots of `beta`, including `beta`, sorted.
    pub fn subroots(&self, beta: &IntVector) -> Result<Vec<IntVector>> {
        let mut out = Vec::new();
        for r in &self.roots {
            if self.is_subroot(r, beta)? {
                out.push(r.clone());
            }
        }
        Ok(out)
    }

    /// Roots `γ` with `Hom(M_γ, M_β) = 0 = Ext(M_γ, M_β)`.
    pub fn left_perp(&self, beta: &IntVector) -> Result<Vec<IntVector>> {
        let mb = self.require(beta)?;
        let mut out = Vec::new();
        for r in &self.roots {
            let h = hom_ext(&self.tower, &self.modules[r], mb);
            if h.hom_dim_p == 0 && h.ext_dim_p == 0 {
                out.push(r.clone());
            }
        }
        Ok(out)
    }

    /// Simple objects of the left perpendicular category of `M_β`, ordered
    /// so that `(β, E_1, ..., E_{n-1})` is a root sequence.
    pub fn perp_simples(&self, beta: &IntVector) -> Result<Vec<IntVector>> {
        let n = self.ed.n();
        let perp = self.left_perp(beta)?;
        let mut simples = Vec::new();
        for g in &perp {
            let mut minimal = true;
            for h in &perp {
                if h != g && self.is_subroot(h, g)? {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                simples.push(g.clone());
            }
        }
        if simples.len() != n - 1 {
            return Err(Error::CountMismatch { beta: beta.clone(), expected: n - 1, found: simples.len() });
        }
        order_as_sequence(&self.ed, beta, simples)
    }
}

/// First ordering (in lexicographic permutation order) of `rest` after
/// `beta` that forms a root sequence.
pub fn order_as_sequence(ed: &EulerData, beta: &IntVector, rest: Vec<IntVector>) -> Result<Vec<IntVector>> {
    let k = rest.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut seq = vec![beta.clone()];
        seq.extend(idx.iter().map(|&i| rest[i].clone()));
        if RootSequence::new(ed, seq).is_ok() {
            return Ok(idx.iter().map(|&i| rest[i].clone()).collect());
        }
        if !next_permutation(&mut idx) {
            return Err(Error::Ordering(format!("perpendicular simples of {beta:?} admit no exceptional order")));
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("successor exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{enumerate_roots, Caps};

    fn v(x: &[i64]) -> IntVector {
        IntVector(x.to_vec())
    }

    #[test]
    fn a3_perp_of_first_simple() {
        let q = ValuedQuiver::simply_laced("a3", 3, &[(2, 1), (3, 2)]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        let roots = enumerate_roots(&q, &ed, Caps::default()).unwrap();
        let s = OracleSession::new(&q, 2, &roots, 0, Exec::default()).unwrap();
        let mut ps = s.perp_simples(&v(&[1, 0, 0])).unwrap();
        ps.sort();
        assert_eq!(ps, vec![v(&[0, 0, 1]), v(&[1, 1, 0])]);
        assert_eq!(s.subroots(&v(&[1, 1, 0])).unwrap(), vec![v(&[1, 0, 0]), v(&[1, 1, 0])]);
    }

    #[test]
    fn rank_one_has_no_perp_simples() {
        let q = ValuedQuiver::simply_laced("a1", 1, &[]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        let roots = enumerate_roots(&q, &ed, Caps::default()).unwrap();
        let s = OracleSession::new(&q, 2, &roots, 0, Exec::default()).unwrap();
        assert!(s.perp_simples(&v(&[1])).unwrap().is_empty());
    }

    #[test]
    fn permutations_are_exhaustive() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
