//! Presentations between projectives and their determinantal
//! semi-invariants.

use rand::Rng;

use super::fpmat::GfMat;
use super::rep::{hom_ext, ModulatedRep, ProjectiveSum, RepMorphism};
use super::tower::FieldTower;
use crate::error::{Error, Result};
use crate::linalg::IntVector;

/// `f: P(γ_1) -> P(γ_0)`.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub source: ProjectiveSum,
    pub target: ProjectiveSum,
    pub map: RepMorphism,
}

impl Presentation {
    pub fn new(tower: &FieldTower, gamma1: &IntVector, gamma0: &IntVector, map: RepMorphism) -> Result<Self> {
        let source = ProjectiveSum::new(tower, gamma1);
        let target = ProjectiveSum::new(tower, gamma0);
        if !map.is_morphism(tower, &source.rep, &target.rep) {
            return Err(Error::Parse("presentation map is not a morphism".into()));
        }
        Ok(Presentation { source, target, map })
    }

    pub fn random(tower: &FieldTower, gamma1: &IntVector, gamma0: &IntVector, rng: &mut impl Rng) -> Self {
        let source = ProjectiveSum::new(tower, gamma1);
        let target = ProjectiveSum::new(tower, gamma0);
        let h = hom_ext(tower, &source.rep, &target.rep);
        let map = h.random_element(tower, rng);
        Presentation { source, target, map }
    }

    /// `γ_0 - γ_1`, the projective-coordinate dimension of the presentation.
    pub fn weight_gamma(&self) -> IntVector {
        self.target.gamma.sub(&self.source.gamma)
    }
}

/// Prime-field matrix of `φ ↦ φ ∘ f` from `Hom(P(γ_0), M)` to `Hom(P(γ_1), M)`.
fn induced_matrix(tower: &FieldTower, pres: &Presentation, m: &ModulatedRep) -> Result<GfMat> {
    let h0 = hom_ext(tower, &pres.target.rep, m);
    let h1 = hom_ext(tower, &pres.source.rep, m);
    if h0.basis.len() != h1.basis.len() {
        return Err(Error::NotSquare { left: h0.basis.len(), right: h1.basis.len() });
    }
    let k = h0.basis.len();
    let mut mat = GfMat::zeros(k, k);
    for (col, phi) in h0.basis.iter().enumerate() {
        let img = phi.compose(tower, &pres.map);
        for (row, c) in h1.coordinates(tower, &img).into_iter().enumerate() {
            mat.set(row, col, c);
        }
    }
    Ok(mat)
}

/// Determinant over the prime field of `Hom(f, M)`.
pub fn det_semiinvariant(tower: &FieldTower, pres: &Presentation, m: &ModulatedRep) -> Result<u32> {
    Ok(induced_matrix(tower, pres, m)?.det(tower.prime()))
}

/// Prime-field determinant of the action of `g` on the generators of the
/// `P_i` summands of `P(γ)`.
pub fn char_det(tower: &FieldTower, g: &RepMorphism, ps: &ProjectiveSum, i: usize) -> u32 {
    let top = &ps.top[i];
    let blk = g.blocks[i].select_rows(top).select_cols(top);
    tower.flatten(i, &blk).det(tower.prime())
}

/// Random automorphism of `P(γ)`, drawn from its endomorphism ring.
pub fn random_automorphism(tower: &FieldTower, ps: &ProjectiveSum, rng: &mut impl Rng) -> RepMorphism {
    let h = hom_ext(tower, &ps.rep, &ps.rep);
    loop {
        let g = h.random_element(tower, rng);
        if g.is_iso(tower) {
            return g;
        }
    }
}

/// `σ(f) Π χ_i(g)^{β_i} χ_i(h)^{β_i}` for comparison with `σ(g f h)`.
pub fn predicted_weight_value(
    tower: &FieldTower,
    sigma_f: u32,
    g: &RepMorphism,
    h: &RepMorphism,
    pres: &Presentation,
    beta: &IntVector,
) -> u32 {
    let prime = tower.prime();
    let mut v = sigma_f;
    for i in 0..tower.n() {
        let e = beta.0[i] as u64;
        v = prime.mul(v, prime.pow(char_det(tower, g, &pres.target, i), e));
        v = prime.mul(v, prime.pow(char_det(tower, h, &pres.source, i), e));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;
    use crate::oracle::exceptional::{build_exceptional, DEFAULT_BUDGET};
    use crate::quiver::{EulerData, ValuedQuiver};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weight_law_on_a3() {
        let q = ValuedQuiver::simply_laced("a3", 3, &[(2, 1), (3, 2)]).unwrap();
        let ed = EulerData::new(&q).unwrap();
        let t = FieldTower::build(&q, 3).unwrap();
        let beta = IntVector(vec![1, 1, 0]);
        let m = build_exceptional(&t, &ed, &beta, 0, DEFAULT_BUDGET, Exec::Sequential).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g1 = IntVector(vec![1, 0, 0]);
        let g0 = IntVector(vec![0, 1, 0]);
        let mut nonzero = 0;
        for _ in 0..20 {
            let pres = Presentation::random(&t, &g1, &g0, &mut rng);
            let s = det_semiinvariant(&t, &pres, &m).unwrap();
            if s != 0 {
                nonzero += 1;
            }
            let g = random_automorphism(&t, &pres.target, &mut rng);
            let h = random_automorphism(&t, &pres.source, &mut rng);
            let moved = Presentation { map: g.compose(&t, &pres.map).compose(&t, &h), ..pres.clone() };
            let lhs = det_semiinvariant(&t, &moved, &m).unwrap();
            assert_eq!(lhs, predicted_weight_value(&t, s, &g, &h, &pres, &beta));
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn zero_map_gives_zero_and_iso_gives_nonzero() {
        let q = ValuedQuiver::simply_laced("a2", 2, &[(2, 1)]).unwrap();
        let t = FieldTower::build(&q, 2).unwrap();
        let gam = IntVector(vec![1, 0]);
        let ps = ProjectiveSum::new(&t, &gam);
        let m = ModulatedRep::projective(&t, 0);
        let zero = Presentation::new(&t, &gam, &gam, RepMorphism::zero(&ps.rep, &ps.rep)).unwrap();
        assert_eq!(det_semiinvariant(&t, &zero, &m).unwrap(), 0);
        let id = Presentation::new(&t, &gam, &gam, RepMorphism::identity(&ps.rep)).unwrap();
        assert_ne!(det_semiinvariant(&t, &id, &m).unwrap(), 0);
    }

    #[test]
    fn non_square_is_an_error() {
        let q = ValuedQuiver::simply_laced("a2", 2, &[(2, 1)]).unwrap();
        let t = FieldTower::build(&q, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pres = Presentation::random(&t, &IntVector(vec![0, 0]), &IntVector(vec![1, 0]), &mut rng);
        let m = ModulatedRep::simple(&t, 0);
        assert!(matches!(det_semiinvariant(&t, &pres, &m), Err(Error::NotSquare { .. })));
    }
}
