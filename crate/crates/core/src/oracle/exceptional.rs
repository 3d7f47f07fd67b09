//! Exceptional modules, the subroot relation, and simples of the
//! perpendicular category.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fpmat::GfMat;
use super::rep::{hom_ext, HomExt, ModulatedRep, RepMorphism};
use super::tower::FieldTower;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::IntVector;
use crate::quiver::EulerData;

/// Default number of random draws before giving up.
pub const DEFAULT_BUDGET: usize = 4096;
/// Exhaustive search is used when the representation space has at most this
/// many points.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 16;
/// Hom spaces up to this size are scanned exhaustively for embeddings.
pub const SUBROOT_EXHAUSTIVE_LIMIT: u64 = 1 << 20;
pub const SUBROOT_SAMPLES: usize = 256;

const CHUNK: usize = 64;

/// Whether `End(M)` is a field, given its Hom data.
///
/// A finite-dimensional algebra over `F_p` is a field iff it is commutative,
/// reduced, and has exactly one local factor. For commutative algebras the
/// Frobenius `a -> a^p` is `F_p`-linear, injective iff the algebra is
/// reduced, and its fixed space has dimension equal to the number of
/// factors when reduced.
pub fn end_is_field(tower: &FieldTower, end: &HomExt) -> bool {
    let m = end.basis.len();
    if m == 0 {
        return false;
    }
    let b = &end.basis;
    for i in 0..m {
        for j in i + 1..m {
            if b[i].compose(tower, &b[j]) != b[j].compose(tower, &b[i]) {
                return false;
            }
        }
    }
    let prime = tower.prime();
    let p = tower.p();
    let mut frob = GfMat::zeros(m, m);
    for (col, g) in b.iter().enumerate() {
        let mut pow = g.clone();
        for _ in 1..p {
            pow = pow.compose(tower, g);
        }
        for (row, c) in end.coordinates(tower, &pow).into_iter().enumerate() {
            frob.set(row, col, c);
        }
    }
    if frob.rank(prime) != m {
        return false;
    }
    let fixed = frob.sub(prime, &GfMat::identity(m));
    m - fixed.rank(prime) == 1
}

/// `Ext(M, M) = 0`, `dim_K End(M) = ⟨β, β⟩`, and `End(M)` a field.
pub fn is_exceptional(tower: &FieldTower, ed: &EulerData, m: &ModulatedRep) -> bool {
    let beta = m.dim_vector();
    let end = hom_ext(tower, m, m);
    end.ext_dim_p == 0 && end.hom_dim_k() as i64 == ed.pair(&beta, &beta) && end_is_field(tower, &end)
}

fn first_success<F>(exec: Exec, total: u64, test: F) -> Option<ModulatedRep>
where
    F: Fn(u64) -> Option<ModulatedRep> + Sync + Send,
{
    let mut start = 0u64;
    while start < total {
        let len = (total - start).min(CHUNK as u64) as usize;
        let hits = exec.map_range(len, |k| test(start + k as u64));
        if let Some(m) = hits.into_iter().flatten().next() {
            return Some(m);
        }
        start += len as u64;
    }
    None
}

fn digits_of(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (code % p as u64) as u32;
            code /= p as u64;
            d
        })
        .collect()
}

/// Draw `k` of the seeded sampler; independent of evaluation order.
pub fn sampled_rep(tower: &FieldTower, dims: &[usize], seed: u64, k: u64) -> ModulatedRep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    ModulatedRep::random(tower, dims, &mut rng)
}

/// An exceptional module of dimension vector `beta`. Small representation
/// spaces are scanned exhaustively in a fixed order; larger ones are sampled
/// with the given seed. Either way the result is the first success in a
/// deterministic draw order.
pub fn build_exceptional(
    tower: &FieldTower,
    ed: &EulerData,
    beta: &IntVector,
    seed: u64,
    budget: usize,
    exec: Exec,
) -> Result<ModulatedRep> {
    if !beta.is_nonnegative() || beta.is_zero() {
        return Err(Error::SearchExhausted { beta: beta.clone() });
    }
    let dims: Vec<usize> = beta.0.iter().map(|&x| x as usize).collect();
    let space = ModulatedRep::rep_space_dim(tower, &dims);
    let points = (tower.p() as u64).checked_pow(space as u32);
    let found = match points {
        Some(total) if total <= EXHAUSTIVE_LIMIT => first_success(exec, total, |code| {
            let m = ModulatedRep::from_digits(tower, &dims, &digits_of(code, tower.p(), space));
            is_exceptional(tower, ed, &m).then_some(m)
        }),
        _ => first_success(exec, budget as u64, |k| {
            let m = sampled_rep(tower, &dims, seed, k);
            is_exceptional(tower, ed, &m).then_some(m)
        }),
    };
    found.ok_or_else(|| Error::SearchExhausted { beta: beta.clone() })
}

/// Whether some morphism `sub -> m` is injective at every vertex.
pub fn is_subroot(tower: &FieldTower, sub: &ModulatedRep, m: &ModulatedRep, seed: u64) -> Result<bool> {
    if sub.dims.iter().zip(&m.dims).any(|(a, b)| a > b) {
        return Ok(false);
    }
    let h = hom_ext(tower, sub, m);
    let dim = h.basis.len();
    if dim == 0 {
        return Ok(false);
    }
    let p = tower.p();
    match (p as u64).checked_pow(dim as u32) {
        Some(total) if total <= SUBROOT_EXHAUSTIVE_LIMIT => {
            for code in 1..total {
                if h.combine(tower, &digits_of(code, p, dim)).is_injective(tower) {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..SUBROOT_SAMPLES {
                if h.random_element(tower, &mut rng).is_injective(tower) {
                    return Ok(true);
                }
            }
            Err(Error::SubrootInconclusive { sub: sub.dim_vector(), beta: m.dim_vector() })
        }
    }
}

/// Some morphism `a -> b` that is an isomorphism, searched exhaustively
/// for small Hom spaces and by sampling otherwise.
pub fn find_iso(tower: &FieldTower, a: &ModulatedRep, b: &ModulatedRep, seed: u64) -> Option<RepMorphism> {
    if a.dims != b.dims {
        return None;
    }
    let h = hom_ext(tower, a, b);
    let dim = h.basis.len();
    let p = tower.p();
    match (p as u64).checked_pow(dim as u32) {
        Some(total) if total <= SUBROOT_EXHAUSTIVE_LIMIT => {
            (1..total).map(|code| h.combine(tower, &digits_of(code, p, dim))).find(|g| g.is_iso(tower))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..SUBROOT_SAMPLES).map(|_| h.random_element(tower, &mut rng)).find(|g| g.is_iso(tower))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::ValuedQuiver;

    #[test]
    fn a3_sincere_module_has_rank_one_maps() {
        let q = ValuedQuiver::simply_laced("a3", 3, &[(2, 1), (3, 2)]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        let t = FieldTower::build(&q, 2).unwrap();
        let m = build_exceptional(&t, &ed, &IntVector(vec![1, 1, 1]), 0, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        for a in &m.maps {
            assert_eq!(a.rank(t.prime()), 1);
        }
    }

    #[test]
    fn decomposable_modules_fail_the_field_test() {
        let q = ValuedQuiver::simply_laced("a2", 2, &[(2, 1)]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        let t = FieldTower::build(&q, 2).unwrap();
        let split = ModulatedRep::with_zero_maps(&t, &[1, 1]);
        assert!(!is_exceptional(&t, &ed, &split));
        let glued = ModulatedRep::from_digits(&t, &[1, 1], &[1]);
        assert!(is_exceptional(&t, &ed, &glued));
    }

    #[test]
    fn a3_subroots_of_p2() {
        let q = ValuedQuiver::simply_laced("a3", 3, &[(2, 1), (3, 2)]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        let t = FieldTower::build(&q, 2).unwrap();
        let build =
            |v: Vec<i64>| build_exceptional(&t, &ed, &IntVector(v), 0, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        let p2 = build(vec![1, 1, 0]);
        assert!(is_subroot(&t, &build(vec![1, 0, 0]), &p2, 0).unwrap());
        assert!(!is_subroot(&t, &build(vec![0, 1, 0]), &p2, 0).unwrap());
        assert!(is_subroot(&t, &p2, &p2, 0).unwrap());
    }
}
