//! Representations of the modulated quiver over a [`FieldTower`], morphisms
//! between them, and the Hom/Ext computation.
//!
//! A representation stores, for each arrow `i -> j`, the `F_j`-matrix of its
//! structure map `V_i ⊗ M_ij -> V_j` of shape `a_j × (a_i d_ij)`, with the
//! domain ordered as `a_i` blocks of `d_ij` target coordinates. A morphism
//! stores one `F_i`-matrix per vertex.
//!
//! Hom and Ext come from the standard exact sequence
//! `0 -> Hom(V,W) -> ⊕ Hom_{F_i}(V_i,W_i) -> ⊕ Hom_{F_j}(V_i⊗M_ij, W_j) -> Ext(V,W) -> 0`.
//! The middle map is assembled over the prime field with one unknown per
//! prime-field coordinate of each `F_i` entry, so `F_i`-linearity is built
//! into the parametrization.

use rand::Rng;

use super::fpmat::{GfMat, Kernel};
use super::tower::FieldTower;
use crate::linalg::IntVector;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModulatedRep {
    pub dims: Vec<usize>,
    pub maps: Vec<GfMat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RepMorphism {
    pub blocks: Vec<GfMat>,
}

impl ModulatedRep {
    pub fn zero(tower: &FieldTower) -> Self {
        Self::with_zero_maps(tower, &vec![0; tower.n()])
    }

    pub fn with_zero_maps(tower: &FieldTower, dims: &[usize]) -> Self {
        let maps = tower.arrows().iter().map(|a| GfMat::zeros(dims[a.target], dims[a.source] * a.d_st)).collect();
        ModulatedRep { dims: dims.to_vec(), maps }
    }

    pub fn simple(tower: &FieldTower, i: usize) -> Self {
        let mut dims = vec![0; tower.n()];
        dims[i] = 1;
        Self::with_zero_maps(tower, &dims)
    }

    pub fn dim_vector(&self) -> IntVector {
        IntVector(self.dims.iter().map(|&x| x as i64).collect())
    }

    /// Number of prime-field coordinates in the space of structure maps.
    pub fn rep_space_dim(tower: &FieldTower, dims: &[usize]) -> usize {
        tower.arrows().iter().map(|a| dims[a.target] * dims[a.source] * a.d_st * tower.field(a.target).degree()).sum()
    }

    /// Representation whose structure-map coordinates are `digits`, read in
    /// arrow order, row-major, lowest prime-field digit first.
    pub fn from_digits(tower: &FieldTower, dims: &[usize], digits: &[u32]) -> Self {
        let mut rep = Self::with_zero_maps(tower, dims);
        let mut pos = 0;
        for (k, a) in tower.arrows().iter().enumerate() {
            let ft = tower.field(a.target);
            let m = &mut rep.maps[k];
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let deg = ft.degree();
                    m.set(r, c, ft.from_digits(&digits[pos..pos + deg]));
                    pos += deg;
                }
            }
        }
        debug_assert_eq!(pos, digits.len());
        rep
    }

    pub fn random(tower: &FieldTower, dims: &[usize], rng: &mut impl Rng) -> Self {
        let n = Self::rep_space_dim(tower, dims);
        let p = tower.p();
        let digits: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        Self::from_digits(tower, dims, &digits)
    }

    /// Projective cover of the simple at vertex `i`. Each vertex space is
    /// the direct sum over incoming arrows `k -> j` of `(P_i)_k ⊗ M_kj`, and
    /// every structure map is the inclusion of its summand.
    pub fn projective(tower: &FieldTower, i: usize) -> Self {
        let n = tower.n();
        let mut dims = vec![0usize; n];
        dims[i] = 1;
        let mut offsets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); tower.arrows().len()];
        for j in (0..i).rev() {
            for (k, a) in tower.arrows().iter().enumerate() {
                if a.target == j && a.source <= i && dims[a.source] > 0 {
                    offsets[k].push((dims[j], dims[a.source] * a.d_st));
                    dims[j] += dims[a.source] * a.d_st;
                }
            }
        }
        let mut rep = Self::with_zero_maps(tower, &dims);
        for (k, offs) in offsets.iter().enumerate() {
            for &(start, width) in offs {
                for t in 0..width {
                    rep.maps[k].set(start + t, t, 1);
                }
            }
        }
        rep
    }

    pub fn direct_sum(tower: &FieldTower, parts: &[ModulatedRep]) -> Self {
        let n = tower.n();
        let dims: Vec<usize> = (0..n).map(|i| parts.iter().map(|p| p.dims[i]).sum()).collect();
        let mut rep = Self::with_zero_maps(tower, &dims);
        let mut row_off = vec![0usize; n];
        for part in parts {
            for (k, a) in tower.arrows().iter().enumerate() {
                rep.maps[k].put_block(row_off[a.target], row_off[a.source] * a.d_st, &part.maps[k]);
            }
            for i in 0..n {
                row_off[i] += part.dims[i];
            }
        }
        rep
    }
}

/// `P(γ) = ⊕ P_i^{γ_i}` together with the coordinates of the generators of
/// each `P_i` summand inside vertex `i`.
#[derive(Clone, Debug)]
pub struct ProjectiveSum {
    pub gamma: IntVector,
    pub rep: ModulatedRep,
    pub top: Vec<Vec<usize>>,
}

impl ProjectiveSum {
    pub fn new(tower: &FieldTower, gamma: &IntVector) -> Self {
        let n = tower.n();
        let mut parts = Vec::new();
        let mut top = vec![Vec::new(); n];
        let mut offs = vec![0usize; n];
        for i in 0..n {
            let pi = ModulatedRep::projective(tower, i);
            for _ in 0..gamma.0[i].max(0) {
                // The generator of P_i sits at vertex i, coordinate 0.
                top[i].push(offs[i]);
                for v in 0..n {
                    offs[v] += pi.dims[v];
                }
                parts.push(pi.clone());
            }
        }
        ProjectiveSum { gamma: gamma.clone(), rep: ModulatedRep::direct_sum(tower, &parts), top }
    }
}

impl RepMorphism {
    pub fn zero(v: &ModulatedRep, w: &ModulatedRep) -> Self {
        RepMorphism { blocks: v.dims.iter().zip(&w.dims).map(|(&a, &b)| GfMat::zeros(b, a)).collect() }
    }

    pub fn identity(v: &ModulatedRep) -> Self {
        RepMorphism { blocks: v.dims.iter().map(|&a| GfMat::identity(a)).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, tower: &FieldTower, other: &RepMorphism) -> RepMorphism {
        RepMorphism {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .enumerate()
                .map(|(i, (g, f))| g.mul(tower.field(i), f))
                .collect(),
        }
    }

    pub fn add(&self, tower: &FieldTower, other: &RepMorphism) -> RepMorphism {
        RepMorphism {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .enumerate()
                .map(|(i, (g, f))| g.add(tower.field(i), f))
                .collect(),
        }
    }

    pub fn scale(&self, tower: &FieldTower, c: u32) -> RepMorphism {
        RepMorphism {
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(i, g)| g.scale(tower.field(i), tower.field(i).scalar(c)))
                .collect(),
        }
    }

    pub fn is_injective(&self, tower: &FieldTower) -> bool {
        self.blocks.iter().enumerate().all(|(i, g)| g.has_full_column_rank(tower.field(i)))
    }

    pub fn is_surjective(&self, tower: &FieldTower) -> bool {
        self.blocks.iter().enumerate().all(|(i, g)| g.has_full_row_rank(tower.field(i)))
    }

    pub fn is_iso(&self, tower: &FieldTower) -> bool {
        self.blocks.iter().enumerate().all(|(i, g)| g.rows() == g.cols() && g.has_full_column_rank(tower.field(i)))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    /// `A^W (g_i ⊗ 1) = g_j A^V` for every arrow.
    pub fn is_morphism(&self, tower: &FieldTower, v: &ModulatedRep, w: &ModulatedRep) -> bool {
        tower.arrows().iter().enumerate().all(|(k, a)| {
            let ft = tower.field(a.target);
            let g = &self.blocks[a.source];
            let d = a.d_st;
            let mut gt = GfMat::zeros(g.rows() * d, g.cols() * d);
            for r in 0..g.rows() {
                for c in 0..g.cols() {
                    gt.put_block(r * d, c * d, &a.rho(g.get(r, c)));
                }
            }
            w.maps[k].mul(ft, &gt) == self.blocks[a.target].mul(ft, &v.maps[k])
        })
    }
}

/// Positions of the prime-field unknowns of a morphism `V -> W`.
#[derive(Clone, Debug)]
pub struct HomLayout {
    src: Vec<usize>,
    dst: Vec<usize>,
    deg: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl HomLayout {
    pub fn new(tower: &FieldTower, v: &ModulatedRep, w: &ModulatedRep) -> Self {
        let n = tower.n();
        let deg: Vec<usize> = (0..n).map(|i| tower.field(i).degree()).collect();
        let mut offsets = Vec::with_capacity(n);
        let mut total = 0;
        for i in 0..n {
            offsets.push(total);
            total += w.dims[i] * v.dims[i] * deg[i];
        }
        HomLayout { src: v.dims.clone(), dst: w.dims.clone(), deg, offsets, total }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn index(&self, i: usize, r: usize, c: usize, t: usize) -> usize {
        self.offsets[i] + (r * self.src[i] + c) * self.deg[i] + t
    }

    pub fn flatten(&self, tower: &FieldTower, g: &RepMorphism) -> Vec<u32> {
        let mut out = vec![0u32; self.total];
        for (i, b) in g.blocks.iter().enumerate() {
            let f = tower.field(i);
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    for (t, d) in f.digits(b.get(r, c)).enumerate() {
                        out[self.index(i, r, c, t)] = d;
                    }
                }
            }
        }
        out
    }

    pub fn unflatten(&self, tower: &FieldTower, v: &[u32]) -> RepMorphism {
        let blocks = (0..self.src.len())
            .map(|i| {
                let f = tower.field(i);
                let mut b = GfMat::zeros(self.dst[i], self.src[i]);
                for r in 0..self.dst[i] {
                    for c in 0..self.src[i] {
                        let s = self.index(i, r, c, 0);
                        b.set(r, c, f.from_digits(&v[s..s + self.deg[i]]));
                    }
                }
                b
            })
            .collect();
        RepMorphism { blocks }
    }
}

pub struct HomExt {
    pub layout: HomLayout,
    pub kernel: Kernel,
    pub basis: Vec<RepMorphism>,
    /// Over the prime field.
    pub hom_dim_p: usize,
    pub ext_dim_p: usize,
    e: usize,
}

impl HomExt {
    pub fn hom_dim_k(&self) -> usize {
        self.hom_dim_p / self.e
    }

    pub fn ext_dim_k(&self) -> usize {
        self.ext_dim_p / self.e
    }

    /// Prime-field coordinates of a morphism in `basis`.
    pub fn coordinates(&self, tower: &FieldTower, g: &RepMorphism) -> Vec<u32> {
        self.kernel.coordinates(&self.layout.flatten(tower, g))
    }

    /// Linear combination of the basis with prime-field coefficients.
    pub fn combine(&self, tower: &FieldTower, coeffs: &[u32]) -> RepMorphism {
        let p = tower.p();
        let mut v = vec![0u32; self.layout.len()];
        for (b, &c) in self.kernel.basis.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(b) {
                *x = (*x + c * y) % p;
            }
        }
        self.layout.unflatten(tower, &v)
    }

    pub fn random_element(&self, tower: &FieldTower, rng: &mut impl Rng) -> RepMorphism {
        let coeffs: Vec<u32> = (0..self.basis.len()).map(|_| rng.gen_range(0..tower.p())).collect();
        self.combine(tower, &coeffs)
    }
}

/// Hom space basis and Ext dimension for `V`, `W`.
pub fn hom_ext(tower: &FieldTower, v: &ModulatedRep, w: &ModulatedRep) -> HomExt {
    let layout = HomLayout::new(tower, v, w);
    let arrows = tower.arrows();
    let mut row_off = Vec::with_capacity(arrows.len());
    let mut rows = 0;
    for a in arrows {
        row_off.push(rows);
        rows += w.dims[a.target] * v.dims[a.source] * a.d_st * tower.field(a.target).degree();
    }
    let mut t = GfMat::zeros(rows, layout.len());
    let prime = tower.prime();
    for i in 0..tower.n() {
        let fi = tower.field(i);
        for r in 0..w.dims[i] {
            for c in 0..v.dims[i] {
                for tt in 0..fi.degree() {
                    let col = layout.index(i, r, c, tt);
                    let x = fi.basis(tt);
                    for (k, a) in arrows.iter().enumerate() {
                        let ft = tower.field(a.target);
                        let kj = ft.degree();
                        let width = v.dims[a.source] * a.d_st;
                        let put = |t: &mut GfMat, s: usize, cc: usize, val: u32| {
                            for (dt, digit) in ft.digits(val).enumerate() {
                                let row = row_off[k] + (s * width + cc) * kj + dt;
                                let cur = t.get(row, col);
                                t.set(row, col, prime.add(cur, digit));
                            }
                        };
                        if a.source == i {
                            // A^W (g ⊗ 1): block column c gets A^W[:, r-block] ρ(x).
                            let d = a.d_st;
                            let blk = w.maps[k].block(0, r * d, w.dims[a.target], d).mul(ft, &a.rho(x));
                            for s in 0..blk.rows() {
                                for l in 0..d {
                                    put(&mut t, s, c * d + l, blk.get(s, l));
                                }
                            }
                        }
                        if a.target == i {
                            // -g A^V: row r gets -x times row c of A^V.
                            for cc in 0..width {
                                let val = ft.neg(ft.mul(x, v.maps[k].get(c, cc)));
                                put(&mut t, r, cc, val);
                            }
                        }
                    }
                }
            }
        }
    }
    let kernel = t.kernel(prime);
    let basis = kernel.basis.iter().map(|b| layout.unflatten(tower, b)).collect();
    let hom_dim_p = kernel.dim();
    let ext_dim_p = rows - kernel.rank;
    HomExt { layout, kernel, basis, hom_dim_p, ext_dim_p, e: tower.e() }
}

/// Cokernel of `f: X -> Y` with the projection `Y -> coker f`.
pub fn cokernel(tower: &FieldTower, f: &RepMorphism, y: &ModulatedRep) -> (ModulatedRep, RepMorphism) {
    let n = tower.n();
    let mut keep: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut proj: Vec<GfMat> = Vec::with_capacity(n);
    for j in 0..n {
        let fj = tower.field(j);
        let rr = f.blocks[j].transpose().rref(fj);
        let pivots = rr.pivots.clone();
        let non: Vec<usize> = (0..y.dims[j]).filter(|c| !pivots.contains(c)).collect();
        let mut pi = GfMat::zeros(non.len(), y.dims[j]);
        for (k, &q) in non.iter().enumerate() {
            pi.set(k, q, 1);
        }
        for (r, &pc) in pivots.iter().enumerate() {
            for (k, &q) in non.iter().enumerate() {
                pi.set(k, pc, fj.neg(rr.matrix.get(r, q)));
            }
        }
        keep.push(non);
        proj.push(pi);
    }
    let dims: Vec<usize> = keep.iter().map(|k| k.len()).collect();
    let mut q = ModulatedRep::with_zero_maps(tower, &dims);
    for (k, a) in tower.arrows().iter().enumerate() {
        let ft = tower.field(a.target);
        let cols: Vec<usize> = keep[a.source].iter().flat_map(|&c| (0..a.d_st).map(move |l| c * a.d_st + l)).collect();
        q.maps[k] = proj[a.target].mul(ft, &y.maps[k].select_cols(&cols));
    }
    (q, RepMorphism { blocks: proj })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{ArrowSpec, EulerData, QuiverSpec, ValuedQuiver, VertexSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn a3() -> ValuedQuiver {
        ValuedQuiver::simply_laced("a3", 3, &[(2, 1), (3, 2)]).unwrap()
    }

    fn b3() -> ValuedQuiver {
        ValuedQuiver::new(&QuiverSpec {
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
        })
        .unwrap()
    }

    #[test]
    fn projective_dims_match_inverse_of_l() {
        for (q, order) in [(a3(), 2), (a3(), 3), (b3(), 2), (b3(), 4)] {
            let t = FieldTower::build(&q, order).unwrap();
            let ed = EulerData::new(&q).unwrap();
            for i in 0..q.n() {
                let p = ModulatedRep::projective(&t, i);
                assert_eq!(p.dim_vector(), ed.projective(i));
                let h = hom_ext(&t, &p, &p);
                assert_eq!(h.ext_dim_k(), 0);
            }
        }
    }

    #[test]
    fn simple_endomorphisms() {
        let q = b3();
        let t = FieldTower::build(&q, 2).unwrap();
        for i in 0..3 {
            let s = ModulatedRep::simple(&t, i);
            let h = hom_ext(&t, &s, &s);
            assert_eq!(h.hom_dim_k() as i64, q.f()[i]);
            assert_eq!(h.ext_dim_k(), 0);
        }
    }

    #[test]
    fn a3_projective_to_simple() {
        let t = FieldTower::build(&a3(), 2).unwrap();
        let h = hom_ext(&t, &ModulatedRep::projective(&t, 0), &ModulatedRep::simple(&t, 2));
        assert_eq!((h.hom_dim_k(), h.ext_dim_k()), (0, 0));
    }

    #[test]
    fn euler_form_matches_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (q, order) in [(a3(), 2), (b3(), 2), (b3(), 3)] {
            let t = FieldTower::build(&q, order).unwrap();
            let ed = EulerData::new(&q).unwrap();
            for _ in 0..40 {
                let dv: Vec<usize> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                let dw: Vec<usize> = (0..3).map(|_| rng.gen_range(0..3)).collect();
                let v = ModulatedRep::random(&t, &dv, &mut rng);
                let w = ModulatedRep::random(&t, &dw, &mut rng);
                let h = hom_ext(&t, &v, &w);
                let expected = ed.pair(&v.dim_vector(), &w.dim_vector());
                assert_eq!(h.hom_dim_k() as i64 - h.ext_dim_k() as i64, expected);
                for g in &h.basis {
                    assert!(g.is_morphism(&t, &v, &w));
                }
            }
        }
    }

    #[test]
    fn cokernel_of_radical_inclusion_is_simple() {
        let t = FieldTower::build(&a3(), 3).unwrap();
        let p1 = ModulatedRep::projective(&t, 0);
        let p2 = ModulatedRep::projective(&t, 1);
        let h = hom_ext(&t, &p1, &p2);
        assert_eq!(h.basis.len(), 1);
        let (c, pi) = cokernel(&t, &h.basis[0], &p2);
        assert_eq!(c.dims, vec![0, 1, 0]);
        assert!(pi.is_morphism(&t, &p2, &c));
        assert!(pi.compose(&t, &h.basis[0]).is_zero());
    }

    #[test]
    fn projective_sum_tracks_generators() {
        let t = FieldTower::build(&a3(), 2).unwrap();
        let ps = ProjectiveSum::new(&t, &IntVector(vec![1, 2, 0]));
        assert_eq!(ps.rep.dims, vec![3, 2, 0]);
        assert_eq!(ps.top[0], vec![0]);
        assert_eq!(ps.top[1], vec![0, 1]);
    }
}
