//! Polynomials over prime fields `F_p` (`p < 2⁶³`) and their factorization.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{big_mod, inv_mod, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::IntPoly;

/// Polynomial over `F_p`, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModPoly {
    p: u64,
    c: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        ModPoly { p, c }
    }

    pub fn from_int(f: &IntPoly, p: u64) -> Self {
        ModPoly::new(p, f.coeffs().iter().map(|x| big_mod(x, p)).collect())
    }

    pub fn to_int(&self) -> IntPoly {
        IntPoly::new(self.c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(p: u64) -> Self {
        ModPoly { p, c: vec![] }
    }

    pub fn one(p: u64) -> Self {
        ModPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        ModPoly::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `deg 0 = -1` folded into `None`.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &a| (mul_mod(acc, x, self.p) + a) % self.p)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        ModPoly::new(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + self.p - o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        ModPoly::new(self.p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return ModPoly::zero(self.p);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        ModPoly::new(self.p, c)
    }

    pub fn scale(&self, k: u64) -> Self {
        ModPoly::new(self.p, self.c.iter().map(|&a| mul_mod(a, k, self.p)).collect())
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => self.scale(inv_mod(l, self.p).unwrap()),
        }
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.deg();
        let inv = inv_mod(*d.c.last().unwrap(), self.p).unwrap();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (ModPoly::zero(self.p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let t = mul_mod(r[i], inv, self.p);
            q[i - dd] = t;
            if t != 0 {
                for (j, &b) in d.c.iter().enumerate() {
                    let k = i - dd + j;
                    r[k] = (r[k] + self.p - mul_mod(t, b, self.p)) % self.p;
                }
            }
        }
        r.truncate(dd);
        (ModPoly::new(self.p, q), ModPoly::new(self.p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let c = self.c.iter().enumerate().skip(1).map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p)).collect();
        ModPoly::new(self.p, c)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut r = ModPoly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    /// Roots in `F_p`, ascending; requires `self` squarefree for exact
    /// multiplicity-free output.
    pub fn roots(&self) -> Vec<u64> {
        let g = ModPoly::x(self.p).pow_mod(self.p as u128, self).sub(&ModPoly::x(self.p)).gcd(self);
        let mut out: Vec<u64> = if self.p < 50 {
            (0..self.p).filter(|&r| g.eval(r) == 0).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed_for(self));
            equal_degree(&g, 1, &mut rng).into_iter().map(|h| (self.p - h.c[0]) % self.p).collect()
        };
        out.sort_unstable();
        out
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) mod {}", self.to_int(), self.p)
    }
}

fn seed_for(f: &ModPoly) -> u64 {
    // FNV-1a over the coefficients and modulus
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &x in f.c.iter().chain(std::iter::once(&f.p)) {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Complete factorization of an integer polynomial modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPolyFactorization {
    pub p: u64,
    /// Monic irreducible factors with multiplicities, sorted by degree then
    /// coefficients.
    pub factors: Vec<(ModPoly, u32)>,
}

impl ModPolyFactorization {
    /// Factor degrees with multiplicity, ascending.
    pub fn degree_pattern(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, e)| std::iter::repeat_n(g.deg(), *e as usize))
            .collect();
        d.sort_unstable();
        d
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// Product of the factors with multiplicity.
    pub fn product(&self) -> ModPoly {
        self.factors
            .iter()
            .fold(ModPoly::one(self.p), |acc, (g, e)| (0..*e).fold(acc, |a, _| a.mul(g)))
    }
}

/// Factors `f` modulo the prime `p` into monic irreducibles.
pub fn factor_poly_mod_p(f: &IntPoly, p: &BigInt) -> Result<ModPolyFactorization> {
    let pu = p.to_u64().filter(|&q| q < 1 << 62 && is_prime(q)).ok_or_else(|| Error::NotPrime(p.to_string()))?;
    let g = ModPoly::from_int(f, pu);
    if g.is_zero() {
        return Err(Error::InvalidArgument(format!("polynomial vanishes mod {pu}")));
    }
    Ok(factor_mod(&g))
}

/// Factorization of a nonzero polynomial over `F_p`; the leading
/// coefficient is dropped.
pub fn factor_mod(f: &ModPoly) -> ModPolyFactorization {
    let p = f.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(f));
    let mut out = Vec::new();
    for (sf, mult) in squarefree(&f.monic()) {
        for (d, part) in distinct_degree(&sf) {
            for g in equal_degree(&part, d, &mut rng) {
                out.push((g, mult));
            }
        }
    }
    out.sort_by(|(a, _), (b, _)| a.c.len().cmp(&b.c.len()).then_with(|| a.c.cmp(&b.c)));
    // merge identical factors arising from separate squarefree layers
    let mut merged: Vec<(ModPoly, u32)> = Vec::new();
    for (g, e) in out {
        match merged.last_mut() {
            Some((h, m)) if *h == g => *m += e,
            _ => merged.push((g, e)),
        }
    }
    ModPolyFactorization { p, factors: merged }
}

/// Squarefree decomposition of a monic polynomial: pairs `(g, m)` with `g`
/// squarefree and `f = ∏ g^m`.
fn squarefree(f: &ModPoly) -> Vec<(ModPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        // f(x) = g(x^p); in F_p the p-th root of a coefficient is itself
        let g = ModPoly::new(p, f.c.iter().step_by(p as usize).copied().collect());
        for (h, m) in squarefree(&g) {
            out.push((h, m * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.divrem(&c).0;
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let z = w.divrem(&y).0;
        if z.deg() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.divrem(&w).0;
    }
    if c.deg() > 0 {
        for (h, m) in squarefree(&c.monic()) {
            out.push((h, m));
        }
    }
    // c may be a p-th power only; fold duplicate multiplicities together
    let mut merged: Vec<(ModPoly, u32)> = Vec::new();
    for (g, m) in out {
        if let Some(pos) = merged.iter().position(|(_, mm)| *mm == m) {
            let prod = merged[pos].0.mul(&g);
            merged[pos].0 = prod;
        } else {
            merged.push((g, m));
        }
    }
    merged
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree.
fn distinct_degree(f: &ModPoly) -> Vec<(usize, ModPoly)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = ModPoly::x(p);
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p as u128, &rest);
        let g = h.sub(&ModPoly::x(p)).gcd(&rest);
        if g.deg() > 0 {
            rest = rest.divrem(&g).0.monic();
            h = h.rem(&rest);
            out.push((d, g));
        }
    }
    if rest.deg() > 0 {
        out.push((rest.deg(), rest));
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of irreducibles of degree `d`.
fn equal_degree(f: &ModPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
    let p = f.p;
    let n = f.deg();
    if n == d {
        return vec![f.monic()];
    }
    if n == 0 {
        return vec![];
    }
    loop {
        let a = ModPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg_or_zero() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a² + ... + a^(2^(d-1))
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            a.pow_mod(e, f).sub(&ModPoly::one(p))
        };
        let g = b.gcd(f);
        if g.deg_or_zero() > 0 && g.deg() < n {
            let h = f.divrem(&g).0.monic();
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

impl ModPoly {
    fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }
}

/// Discrete-log-free cubic character: the exponent `k ∈ {0,1,2}` with
/// `x^((q-1)/3) = ω^k`, where `ω = g^((q-1)/3)` for the least `g ≥ 2`
/// giving a nontrivial cube root of unity. Requires `q ≡ 1 (mod 3)`, `x ≢ 0`.
#[derive(Clone, Debug)]
pub struct CubicCharacter {
    q: u64,
    e: u64,
    omega: u64,
    omega2: u64,
}

impl CubicCharacter {
    pub fn new(q: u64) -> Self {
        assert!(q % 3 == 1, "cubic character needs q ≡ 1 mod 3");
        let e = (q - 1) / 3;
        let omega = (2..q).map(|g| pow_mod(g, e, q)).find(|&w| w != 1).unwrap();
        CubicCharacter { q, e, omega, omega2: mul_mod(omega, omega, q) }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn eval(&self, x: u64) -> u8 {
        let y = pow_mod(x % self.q, self.e, self.q);
        if y == 1 {
            0
        } else if y == self.omega {
            1
        } else {
            debug_assert_eq!(y, self.omega2, "argument divisible by q");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(c: &[i64], p: u64) -> Vec<(Vec<u64>, u32)> {
        factor_poly_mod_p(&IntPoly::from_i64s(c), &BigInt::from(p))
            .unwrap()
            .factors
            .into_iter()
            .map(|(g, e)| (g.c, e))
            .collect()
    }

    #[test]
    fn textbook_cases() {
        assert_eq!(fac(&[1, 0, 1], 5), vec![(vec![2, 1], 1), (vec![3, 1], 1)]);
        assert_eq!(fac(&[1, 0, 0, 0, 1], 2), vec![(vec![1, 1], 4)]);
        assert!(factor_poly_mod_p(&IntPoly::from_i64s(&[1, 1]), &BigInt::from(9)).is_err());
    }

    #[test]
    fn products_reconstruct() {
        for p in [2u64, 3, 5, 7, 101, 1_000_003] {
            let f = IntPoly::from_i64s(&[3, -7, 0, 2, 1, 5, 1]);
            let fz = factor_poly_mod_p(&f, &BigInt::from(p)).unwrap();
            assert_eq!(fz.product(), ModPoly::from_int(&f, p).monic());
        }
    }

    #[test]
    fn roots_and_cubic_character() {
        let f = ModPoly::new(13, vec![12, 0, 1]); // x² - 1
        assert_eq!(f.roots(), vec![1, 12]);
        let chi = CubicCharacter::new(7);
        // cubes mod 7 are {1, 6}
        assert_eq!(chi.eval(1), 0);
        assert_eq!(chi.eval(6), 0);
        assert_ne!(chi.eval(2), 0);
        assert_eq!((chi.eval(2) + chi.eval(4)) % 3, chi.eval(8));
    }
}
