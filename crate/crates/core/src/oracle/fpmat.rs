//! Dense matrices over a [`Gf`] and the one elimination kernel everything
//! else uses.

use super::gf::Gf;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GfMat {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row echelon form with its pivot columns.
pub struct Rref {
    pub matrix: GfMat,
    pub pivots: Vec<usize>,
}

impl GfMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GfMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        GfMat { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u32) {
        self.data[i * self.cols + j] = x;
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> GfMat {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, f: &Gf, other: &GfMat) -> GfMat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = f.add(out.get(i, j), f.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, f: &Gf, other: &GfMat) -> GfMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        GfMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, f: &Gf, other: &GfMat) -> GfMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        GfMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, f: &Gf, c: u32) -> GfMat {
        GfMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Copies a block into position `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &GfMat) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> GfMat {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> GfMat {
        let mut out = Self::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out.set(k, j, self.get(i, j));
            }
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> GfMat {
        let mut out = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                out.set(i, k, self.get(i, j));
            }
        }
        out
    }

    pub fn rref(&self, f: &Gf) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    let tmp = m.get(p, j);
                    m.set(p, j, m.get(r, j));
                    m.set(r, j, tmp);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self, f: &Gf) -> usize {
        self.rref(f).pivots.len()
    }

    /// Basis of the right nullspace. The basis vector attached to free
    /// column `c` has a 1 at `c` and zeros at every other free column, so
    /// kernel elements are recovered from their free coordinates.
    pub fn kernel(&self, f: &Gf) -> Kernel {
        let Rref { matrix, pivots } = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&fc| {
                let mut v = vec![0u32; self.cols];
                v[fc] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(matrix.get(row, fc));
                }
                v
            })
            .collect();
        Kernel { basis, free, rank: pivots.len() }
    }

    pub fn det(&self, f: &Gf) -> u32 {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = m.rows;
        let mut det = 1u32;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| m.get(i, c) != 0) else {
                return 0;
            };
            if p != c {
                for j in 0..n {
                    let tmp = m.get(p, j);
                    m.set(p, j, m.get(c, j));
                    m.set(c, j, tmp);
                }
                det = f.neg(det);
            }
            let piv = m.get(c, c);
            det = f.mul(det, piv);
            let inv = f.inv(piv);
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self, f: &Gf) -> Option<GfMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        aug.put_block(0, 0, self);
        aug.put_block(0, n, &Self::identity(n));
        let r = aug.rref(f);
        if r.pivots.len() < n || r.pivots[n - 1] >= n {
            return None;
        }
        Some(r.matrix.block(0, n, n, n))
    }

    pub fn has_full_column_rank(&self, f: &Gf) -> bool {
        self.rank(f) == self.cols
    }

    pub fn has_full_row_rank(&self, f: &Gf) -> bool {
        self.rank(f) == self.rows
    }
}

pub struct Kernel {
    pub basis: Vec<Vec<u32>>,
    pub free: Vec<usize>,
    pub rank: usize,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a kernel element in `basis`.
    pub fn coordinates(&self, v: &[u32]) -> Vec<u32> {
        self.free.iter().map(|&c| v[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_rank_over_f3() {
        let f = Gf::new(3, 1).unwrap();
        let m = GfMat::from_rows(&[vec![1, 2, 0], vec![2, 1, 0]]);
        assert_eq!(m.rank(&f), 1);
        let k = m.kernel(&f);
        assert_eq!(k.dim(), 2);
        for v in &k.basis {
            let col = GfMat::from_rows(&v.iter().map(|&x| vec![x]).collect::<Vec<_>>());
            assert!(m.mul(&f, &col).is_zero());
            assert_eq!(k.coordinates(v).iter().filter(|&&x| x == 1).count(), 1);
        }
    }

    #[test]
    fn det_and_inverse_over_f4() {
        let f = Gf::new(2, 2).unwrap();
        let m = GfMat::from_rows(&[vec![1, 2], vec![3, 1]]);
        let d = m.det(&f);
        let expected = f.sub(f.mul(1, 1), f.mul(2, 3));
        assert_eq!(d, expected);
        if d != 0 {
            let inv = m.inverse(&f).unwrap();
            assert_eq!(m.mul(&f, &inv), GfMat::identity(2));
        }
        let sing = GfMat::from_rows(&[vec![2, 2], vec![2, 2]]);
        assert_eq!(sing.det(&f), 0);
        assert!(sing.inverse(&f).is_none());
    }
}
