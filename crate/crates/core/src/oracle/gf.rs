//! Finite fields `F_p[x]/(m)` with log/exp multiplication tables.
//!
//! An element is a `u32` whose base-`p` digits are its polynomial
//! coefficients, lowest degree first. Its digits are therefore also its
//! coordinates over the prime field in the basis `1, x, x^2, ...`.

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct Gf {
    p: u32,
    degree: usize,
    order: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Gf {}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Splits `q = p^e`.
pub fn prime_power(q: u64) -> Result<(u32, usize)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).ok_or(Error::NotPrimePower(q))?;
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    if r != 1 || !is_prime(p) {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p as u32, e))
}

// Dense polynomials over F_p, coefficient vectors lowest degree first.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|k| {
            let x = a.get(k).copied().unwrap_or(0);
            let y = b.get(k).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    a = r as u32;
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let da = a.len() - 1;
        let c = (a[da] as u64 * lead_inv as u64 % p as u64) as u32;
        for k in 0..=dm {
            let idx = da - dm + k;
            a[idx] = ((a[idx] as u64 + (p - c) as u64 * m[k] as u64) % p as u64) as u32;
        }
        a = trim(a);
    }
    a
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    poly_rem(&out.into_iter().map(|x| x as u32).collect::<Vec<_>>(), m, p)
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^k) mod m`.
fn frobenius_power_of_x(k: usize, m: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_rem(&[0, 1], m, p);
    for _ in 0..k {
        let mut acc = vec![1u32];
        let mut base = r.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        r = acc;
    }
    r
}

fn prime_factors(mut k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= k {
        if k.is_multiple_of(d) {
            out.push(d);
            while k.is_multiple_of(d) {
                k /= d;
            }
        }
        d += 1;
    }
    if k > 1 {
        out.push(k);
    }
    out
}

/// Rabin's irreducibility test for a monic polynomial of degree `k`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    let x = vec![0, 1];
    if poly_sub(&frobenius_power_of_x(k, m, p), &poly_rem(&x, m, p), p) != Vec::<u32>::new() {
        return false;
    }
    prime_factors(k).into_iter().all(|r| {
        let h = poly_sub(&frobenius_power_of_x(k / r, m, p), &poly_rem(&x, m, p), p);
        poly_gcd(&h, m, p).len() == 1
    })
}

impl Gf {
    /// Field of order `p^degree` using the first irreducible monic modulus
    /// in lexicographic order of its lower coefficients.
    pub fn new(p: u32, degree: usize) -> Result<Self> {
        assert!(degree >= 1);
        let order = (p as u64).checked_pow(degree as u32).filter(|&o| o <= MAX_FIELD_ORDER);
        let Some(order) = order else {
            return Err(Error::FieldTooLarge { p, degree });
        };
        for code in 0..order {
            let mut m = Vec::with_capacity(degree + 1);
            let mut c = code;
            for _ in 0..degree {
                m.push((c % p as u64) as u32);
                c /= p as u64;
            }
            m.push(1);
            if is_irreducible(&m, p) {
                return Ok(Self::with_modulus(p, m));
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    fn with_modulus(p: u32, modulus: Vec<u32>) -> Self {
        let degree = modulus.len() - 1;
        let order = p.pow(degree as u32);
        let mut gf = Gf { p, degree, order, modulus, exp: Vec::new(), log: Vec::new() };
        let n = (order - 1) as usize;
        // First element whose powers exhaust the multiplicative group.
        for g in 1..order {
            let gp = gf.to_poly(g);
            let mut exp = Vec::with_capacity(2 * n);
            let mut cur = vec![1u32];
            let mut ok = true;
            for k in 0..n {
                let c = gf.poly_to_elem(&cur);
                if k > 0 && c == 1 {
                    ok = false;
                    break;
                }
                exp.push(c);
                cur = poly_mulmod(&cur, &gp, &gf.modulus, p);
            }
            if ok {
                let mut log = vec![0u32; order as usize];
                for (k, &c) in exp.iter().enumerate() {
                    log[c as usize] = k as u32;
                }
                let doubled: Vec<u32> = exp.iter().chain(exp.iter()).copied().collect();
                gf.exp = doubled;
                gf.log = log;
                return gf;
            }
        }
        unreachable!("finite fields have cyclic unit groups")
    }

    fn to_poly(&self, mut a: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.degree);
        for _ in 0..self.degree {
            v.push(a % self.p);
            a /= self.p;
        }
        trim(v)
    }

    fn poly_to_elem(&self, v: &[u32]) -> u32 {
        v.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Class of `x`, a generator over the prime field.
    pub fn x(&self) -> u32 {
        if self.degree == 1 {
            self.poly_to_elem(&poly_rem(&[0, 1], &self.modulus, self.p))
        } else {
            self.p
        }
    }

    /// Element `x^t`, the `t`-th prime-field basis vector.
    pub fn basis(&self, t: usize) -> u32 {
        self.p.pow(t as u32)
    }

    pub fn digit(&self, a: u32, t: usize) -> u32 {
        (a / self.p.pow(t as u32)) % self.p
    }

    pub fn digits(&self, a: u32) -> impl Iterator<Item = u32> + '_ {
        let mut a = a;
        (0..self.degree).map(move |_| {
            let d = a % self.p;
            a /= self.p;
            d
        })
    }

    pub fn from_digits(&self, d: &[u32]) -> u32 {
        self.poly_to_elem(d)
    }

    /// Embeds a prime-field scalar.
    pub fn scalar(&self, c: u32) -> u32 {
        c % self.p
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.degree == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.degree {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        if self.degree == 1 {
            return (self.p - a) % self.p;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.degree {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let n = self.order - 1;
        self.exp[((n - self.log[a as usize]) % n) as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Evaluates a polynomial with coefficients in another field `sub`,
    /// mapped through `emb`, at `a`.
    pub fn eval_mapped(&self, coeffs: &[u32], emb: impl Fn(u32) -> u32, a: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, a), emb(c)))
    }

    /// Roots in this field of a polynomial over the prime field.
    pub fn prime_poly_roots(&self, coeffs: &[u32]) -> Vec<u32> {
        (0..self.order).filter(|&a| self.eval_mapped(coeffs, |c| self.scalar(c), a) == 0).collect()
    }

    /// Roots of the modulus of `sub`, viewed as a polynomial over the prime
    /// field, inside `self`.
    pub fn roots_of_modulus(&self, sub: &Gf) -> Vec<u32> {
        self.prime_poly_roots(sub.modulus())
    }

    /// Table `a -> Σ a_t r^t` for every element `a` of `sub`.
    pub fn embedding_table(&self, sub: &Gf, r: u32) -> Vec<u32> {
        let powers: Vec<u32> = (0..sub.degree()).map(|t| self.pow(r, t as u64)).collect();
        (0..sub.order())
            .map(|a| sub.digits(a).zip(&powers).fold(0, |acc, (d, &rp)| self.add(acc, self.mul(self.scalar(d), rp))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(2).unwrap(), (2, 1));
        assert_eq!(prime_power(9).unwrap(), (3, 2));
        assert_eq!(prime_power(64).unwrap(), (2, 6));
        assert!(prime_power(12).is_err());
        assert!(prime_power(1).is_err());
    }

    #[test]
    fn field_axioms_small_fields() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (2, 4)] {
            let f = Gf::new(p, k).unwrap();
            let q = f.order();
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in [0, 1, q - 1] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn known_moduli() {
        assert_eq!(Gf::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Gf::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Gf::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        let big = Gf::new(2, 4).unwrap();
        let sub = Gf::new(2, 2).unwrap();
        let roots = big.roots_of_modulus(&sub);
        assert_eq!(roots.len(), 2);
        let emb = big.embedding_table(&sub, roots[0]);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(emb[sub.add(a, b) as usize], big.add(emb[a as usize], emb[b as usize]));
                assert_eq!(emb[sub.mul(a, b) as usize], big.mul(emb[a as usize], emb[b as usize]));
            }
        }
        assert_eq!(Gf::new(2, 3).unwrap().roots_of_modulus(&sub).len(), 0);
    }

    #[test]
    fn oversized_fields_refused() {
        assert!(matches!(Gf::new(2, 21), Err(Error::FieldTooLarge { .. })));
    }
}
