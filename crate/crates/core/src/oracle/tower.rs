//! Finite-field realization of a valued quiver: a field `F_i` of order
//! `q^{f_i}` per vertex and a field `M_ij` of order `q^{d_ij f_j}` per arrow,
//! with embeddings of both endpoint fields that agree on `F_q`.

use super::fpmat::GfMat;
use super::gf::{prime_power, Gf};
use crate::error::{Error, Result};
use crate::quiver::ValuedQuiver;

#[derive(Clone, Debug)]
pub struct ArrowBimodule {
    pub source: usize,
    pub target: usize,
    /// `[M : F_target]`.
    pub d_st: usize,
    /// `[M : F_source]`.
    pub d_ts: usize,
    pub field: Gf,
    pub emb_source: Vec<u32>,
    pub emb_target: Vec<u32>,
    /// `y^l` for `l < d_st`, an `F_target`-basis of `M`.
    pub basis: Vec<u32>,
    coords: Vec<u32>,
}

impl ArrowBimodule {
    /// Coordinates of `m` over the target field in `basis`.
    pub fn coords(&self, m: u32) -> &[u32] {
        let d = self.d_st;
        &self.coords[m as usize * d..(m as usize + 1) * d]
    }

    /// Matrix of right multiplication by `x ∈ F_source` on `M`, in target
    /// coordinates: column `l` holds the coordinates of `x · y^l`.
    pub fn rho(&self, x: u32) -> GfMat {
        let d = self.d_st;
        let ex = self.emb_source[x as usize];
        let mut out = GfMat::zeros(d, d);
        for l in 0..d {
            let c = self.coords(self.field.mul(ex, self.basis[l]));
            for (r, &v) in c.iter().enumerate() {
                out.set(r, l, v);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct FieldTower {
    p: u32,
    e: usize,
    prime: Gf,
    base: Gf,
    vertex_fields: Vec<Gf>,
    arrows: Vec<ArrowBimodule>,
}

fn first_root_compatible(big: &Gf, sub: &Gf, base: &Gf, base_in_sub: &[u32], base_in_big: &[u32]) -> Vec<u32> {
    let probe = base.x();
    for r in big.roots_of_modulus(sub) {
        let table = big.embedding_table(sub, r);
        if table[base_in_sub[probe as usize] as usize] == base_in_big[probe as usize] {
            return table;
        }
    }
    unreachable!("every subfield embeds compatibly over the base field")
}

fn base_embedding(big: &Gf, base: &Gf) -> Vec<u32> {
    let r = big.roots_of_modulus(base)[0];
    big.embedding_table(base, r)
}

impl FieldTower {
    pub fn build(q: &ValuedQuiver, order: u64) -> Result<Self> {
        for (i, v) in q.vertices().iter().enumerate() {
            if v.z() != 1 {
                return Err(Error::UnsupportedModulation { vertex: i + 1 });
            }
        }
        let (p, e) = prime_power(order)?;
        let prime = Gf::new(p, 1)?;
        let base = Gf::new(p, e)?;
        let mut cache: Vec<(usize, Gf)> = Vec::new();
        let mut field = |deg: usize| -> Result<Gf> {
            if let Some((_, g)) = cache.iter().find(|(d, _)| *d == deg) {
                return Ok(g.clone());
            }
            let g = Gf::new(p, deg)?;
            cache.push((deg, g.clone()));
            Ok(g)
        };
        let vertex_fields = q.vertices().iter().map(|v| field(e * v.f as usize)).collect::<Result<Vec<_>>>()?;
        let base_in_vertex: Vec<Vec<u32>> = vertex_fields.iter().map(|f| base_embedding(f, &base)).collect();
        let mut arrows = Vec::new();
        for a in q.arrows() {
            let fs = &vertex_fields[a.source];
            let ft = &vertex_fields[a.target];
            let d_st = a.d_st as usize;
            let m = field(ft.degree() * d_st)?;
            let base_in_m = base_embedding(&m, &base);
            let emb_source = first_root_compatible(&m, fs, &base, &base_in_vertex[a.source], &base_in_m);
            let emb_target = first_root_compatible(&m, ft, &base, &base_in_vertex[a.target], &base_in_m);
            let y = m.x();
            let basis: Vec<u32> = (0..d_st).map(|l| m.pow(y, l as u64)).collect();
            let mut coords = vec![u32::MAX; m.order() as usize * d_st];
            let count = (ft.order() as u64).pow(d_st as u32);
            for code in 0..count {
                let mut c = code;
                let mut tuple = Vec::with_capacity(d_st);
                for _ in 0..d_st {
                    tuple.push((c % ft.order() as u64) as u32);
                    c /= ft.order() as u64;
                }
                let elem =
                    tuple.iter().zip(&basis).fold(0, |acc, (&t, &b)| m.add(acc, m.mul(emb_target[t as usize], b)));
                coords[elem as usize * d_st..(elem as usize + 1) * d_st].copy_from_slice(&tuple);
            }
            assert!(coords.iter().all(|&c| c != u32::MAX), "powers of y must form a basis");
            arrows.push(ArrowBimodule {
                source: a.source,
                target: a.target,
                d_st,
                d_ts: a.d_ts as usize,
                field: m,
                emb_source,
                emb_target,
                basis,
                coords,
            });
        }
        Ok(FieldTower { p, e, prime, base, vertex_fields, arrows })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `q = p^e`.
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e as u32)
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn prime(&self) -> &Gf {
        &self.prime
    }

    pub fn base(&self) -> &Gf {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.vertex_fields.len()
    }

    pub fn field(&self, i: usize) -> &Gf {
        &self.vertex_fields[i]
    }

    pub fn arrows(&self) -> &[ArrowBimodule] {
        &self.arrows
    }

    /// Matrix over the prime field of multiplication by `x` on `F_i`.
    pub fn mult_matrix(&self, i: usize, x: u32) -> GfMat {
        let f = &self.vertex_fields[i];
        let k = f.degree();
        let mut out = GfMat::zeros(k, k);
        for t in 0..k {
            for (r, d) in f.digits(f.mul(x, f.basis(t))).enumerate() {
                out.set(r, t, d);
            }
        }
        out
    }

    /// Expands an `F_i`-matrix to its prime-field matrix.
    pub fn flatten(&self, i: usize, m: &GfMat) -> GfMat {
        let k = self.vertex_fields[i].degree();
        let mut out = GfMat::zeros(m.rows() * k, m.cols() * k);
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.put_block(r * k, c * k, &self.mult_matrix(i, m.get(r, c)));
            }
        }
        out
    }
}
