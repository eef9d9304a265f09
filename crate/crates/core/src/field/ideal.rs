//! Integral ideals in Hermite normal form and prime ideal decomposition.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::order::{lattice_coords, p_radical, ModAlgebra};
use super::{Elt, NumberField};
use crate::arith::fp;
use crate::arith::matrix::{hnf_mod, Matrix};
use crate::arith::modp::factor_poly_mod_p;
use crate::arith::{big_mod, is_prime_big};
use crate::error::{Error, Result};
use crate::Int;

/// Integral ideal as a Z-basis in Hermite normal form.
///
/// Internally the basis is kept as rows of a lower triangular matrix on the
/// integral basis; [`IdealHNF::hnf_matrix`] presents the same data in the
/// column convention, where it is upper triangular.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdealHNF {
    field_id: u64,
    rows: Vec<Vec<Int>>,
    norm: Int,
}

impl IdealHNF {
    fn from_matrix(field_id: u64, m: Matrix<Int>) -> Self {
        let n = m.rows();
        let norm = (0..n).map(|i| m[(i, i)].clone()).fold(Int::one(), |a, b| a * b);
        IdealHNF { field_id, rows: m.row_vecs(), norm }
    }

    pub fn norm(&self) -> &Int {
        &self.norm
    }

    /// Basis elements (coordinates on the integral basis).
    pub fn basis(&self) -> &[Vec<Int>] {
        &self.rows
    }

    /// The basis as the rows of a lower triangular matrix.
    pub fn basis_matrix(&self) -> Matrix<Int> {
        Matrix::from_rows(self.rows.clone())
    }

    /// Upper triangular HNF whose columns are the basis elements; its
    /// determinant is the norm.
    pub fn hnf_matrix(&self) -> Matrix<Int> {
        self.basis_matrix().transpose()
    }

    /// Positive generator of `I ∩ Z`.
    pub fn min_integer(&self) -> &Int {
        &self.rows[0][0]
    }

    pub fn is_unit(&self) -> bool {
        self.norm.is_one()
    }

    pub fn field_id(&self) -> u64 {
        self.field_id
    }
}

/// A prime ideal `𝔭 | p` with ramification index `e` and residue degree `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub p: Int,
    pub e: u32,
    pub f: u32,
    /// Second generator `α` of the two-element form `𝔭 = (p, α)`.
    pub gen: Elt,
    /// `α` as a polynomial in `θ` when it came from Dedekind's criterion.
    pub gen_poly: Option<Vec<Int>>,
    pub ideal: IdealHNF,
    /// `β ∈ p𝔭⁻¹ \ pO`, used for valuations.
    anti: Elt,
}

impl PrimeIdeal {
    pub fn norm(&self) -> Int {
        num_traits::pow(self.p.clone(), self.f as usize)
    }

    pub fn two_element(&self) -> (&Int, &Elt) {
        (&self.p, &self.gen)
    }

    /// For a degree-one prime, the residue map `O → F_p` as the images of
    /// the basis elements.
    pub fn residue_functional(&self) -> Option<Vec<u64>> {
        if self.f != 1 {
            return None;
        }
        let p = self.p.to_u64()?;
        let rows: Vec<Vec<u64>> = self.ideal.rows.iter().map(|r| r.iter().map(|x| big_mod(x, p)).collect()).collect();
        let n = rows.len();
        let ker = fp::kernel(&rows, n, p);
        let k = ker.into_iter().next()?;
        // normalize so that 1 = ω_0 maps to 1
        let inv = crate::arith::inv_mod(k[0], p)?;
        Some(k.iter().map(|x| crate::arith::mul_mod(*x, inv, p)).collect())
    }
}

impl NumberField {
    fn check(&self, i: &IdealHNF) -> Result<()> {
        if i.field_id != self.id() {
            return Err(Error::MixedFields);
        }
        Ok(())
    }

    pub fn unit_ideal(&self) -> IdealHNF {
        IdealHNF::from_matrix(self.id(), Matrix::identity(self.degree()))
    }

    /// The ideal generated by the given elements (at least one nonzero).
    pub fn ideal_from_gens(&self, gens: &[Elt]) -> IdealHNF {
        let d = gens
            .iter()
            .filter(|g| !self.is_zero(g))
            .map(|g| self.norm(g).abs())
            .fold(Int::zero(), |a, b| a.gcd(&b));
        assert!(!d.is_zero(), "ideal generated by zero");
        self.ideal_from_gens_mod(gens, &d)
    }

    /// Like [`NumberField::ideal_from_gens`] when a positive integer `d` in
    /// the ideal is known.
    pub(crate) fn ideal_from_gens_mod(&self, gens: &[Elt], d: &Int) -> IdealHNF {
        let n = self.degree();
        let mut z = Vec::with_capacity(gens.len() * n);
        for g in gens {
            for i in 0..n {
                let mut e = self.zero();
                e[i] = Int::one();
                z.push(self.mul(g, &e));
            }
        }
        IdealHNF::from_matrix(self.id(), hnf_mod(&z, n, d))
    }

    pub fn principal_ideal(&self, a: &[Int]) -> IdealHNF {
        self.ideal_from_gens(&[a.to_vec()])
    }

    pub fn ideal_mul(&self, a: &IdealHNF, b: &IdealHNF) -> Result<IdealHNF> {
        self.check(a)?;
        self.check(b)?;
        let mut gens = Vec::with_capacity(self.degree().pow(2));
        for x in &a.rows {
            for y in &b.rows {
                gens.push(self.mul(x, y));
            }
        }
        let d = a.min_integer() * b.min_integer();
        Ok(IdealHNF::from_matrix(self.id(), hnf_mod(&gens, self.degree(), &d)))
    }

    pub fn ideal_pow(&self, a: &IdealHNF, k: u32) -> Result<IdealHNF> {
        self.check(a)?;
        let mut r = self.unit_ideal();
        for _ in 0..k {
            r = self.ideal_mul(&r, a)?;
        }
        Ok(r)
    }

    pub fn prime_power(&self, p: &PrimeIdeal, k: u32) -> Result<IdealHNF> {
        self.ideal_pow(&p.ideal, k)
    }

    pub fn ideal_contains(&self, i: &IdealHNF, x: &[Int]) -> bool {
        lattice_coords(&i.basis_matrix(), x).is_some()
    }

    /// Valuation of a nonzero element at a prime.
    pub fn valuation(&self, pr: &PrimeIdeal, x: &[Int]) -> u32 {
        assert!(!self.is_zero(x), "valuation of zero");
        let mut y = x.to_vec();
        let mut k = 0;
        loop {
            let z = self.mul(&y, &pr.anti);
            if !self.divisible_by(&z, &pr.p) {
                return k;
            }
            y = z.iter().map(|c| c / &pr.p).collect();
            k += 1;
        }
    }

    /// Valuation of an ideal: the least valuation of its basis elements.
    pub fn ideal_valuation(&self, pr: &PrimeIdeal, i: &IdealHNF) -> u32 {
        i.rows.iter().filter(|r| !self.is_zero(r)).map(|r| self.valuation(pr, r)).min().unwrap()
    }

    /// Decomposition `pO = ∏ 𝔭^e`: Dedekind's criterion when `p ∤ [O:Z[θ]]`,
    /// otherwise idempotent splitting of `O/rad(pO)`.
    pub fn factor_rational_prime(&self, p: &Int) -> Result<Vec<PrimeIdeal>> {
        if !is_prime_big(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        let mut out = if !self.index().is_multiple_of(p) {
            self.dedekind(p)?
        } else {
            self.split_by_idempotents(p)?
        };
        let total: u32 = out.iter().map(|q| q.e * q.f).sum();
        if total as usize != self.degree() {
            return Err(Error::Verification(format!("Σ e·f = {total} at p = {p}")));
        }
        out.sort_by(|a, b| a.f.cmp(&b.f).then(a.e.cmp(&b.e)).then(a.ideal.rows.cmp(&b.ideal.rows)));
        Ok(out)
    }

    fn dedekind(&self, p: &Int) -> Result<Vec<PrimeIdeal>> {
        let fac = factor_poly_mod_p(self.poly(), p)?;
        let pe = self.from_int(p);
        let pn = num_traits::pow(p.clone(), self.degree());
        let mut out = Vec::new();
        for (g, e) in &fac.factors {
            let gi = g.to_int();
            let alpha = self.from_poly(&gi);
            let ideal = self.ideal_from_gens_mod(&[pe.clone(), alpha.clone()], &pn);
            let anti = self.anti_uniformizer(&ideal, p);
            let pr = PrimeIdeal {
                p: p.clone(),
                e: *e,
                f: g.degree().unwrap() as u32,
                gen: alpha,
                gen_poly: Some(gi.coeffs().to_vec()),
                ideal,
                anti,
            };
            out.push(pr);
        }
        Ok(out)
    }

    fn anti_uniformizer(&self, ideal: &IdealHNF, p: &Int) -> Elt {
        let pu = p.to_u64().expect("prime fits u64");
        let n = self.degree();
        // x with x·π_j ≡ 0 mod p for every basis element π_j
        let cols: Vec<Vec<Vec<u64>>> = (0..n)
            .map(|i| {
                let mut e = self.zero();
                e[i] = Int::one();
                ideal.rows.iter().map(|r| self.mul(&e, r).iter().map(|c| big_mod(c, pu)).collect()).collect()
            })
            .collect();
        // row i of the system: concatenation over j of (ω_i·π_j mod p)
        let m: Vec<Vec<u64>> = cols.into_iter().map(|v| v.into_iter().flatten().collect()).collect();
        let ker = fp::left_kernel(&m, n * n, pu);
        ker.into_iter().next().expect("p𝔭⁻¹ strictly contains pO").into_iter().map(Int::from).collect()
    }

    fn split_by_idempotents(&self, p: &Int) -> Result<Vec<PrimeIdeal>> {
        let pu = p
            .to_u64()
            .filter(|&q| q < 100_000)
            .ok_or_else(|| Error::Unsupported(format!("index divisor {p} too large for idempotent splitting")))?;
        let n = self.degree();
        let mult = self.mult_table();
        let alg = ModAlgebra::new(mult, pu);
        let one: Vec<u64> = self.one().iter().map(|x| big_mod(x, pu)).collect();
        let rad = p_radical(mult, &self.one(), pu);
        let mut w: Vec<Vec<u64>> = rad.row_vecs().iter().map(|r| r.iter().map(|x| big_mod(x, pu)).collect()).collect();
        w.retain(|r| r.iter().any(|&x| x != 0));
        let piv = fp::rref(&mut w, pu);
        w.truncate(piv.len());
        let reduce = |v: &[u64]| -> Vec<u64> {
            let mut v = v.to_vec();
            for (r, &c) in w.iter().zip(&piv) {
                let t = v[c];
                if t != 0 {
                    for j in 0..n {
                        v[j] = (v[j] + pu - crate::arith::mul_mod(t, r[j], pu)) % pu;
                    }
                }
            }
            v
        };
        let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
        let frob_rows: Vec<Vec<u64>> = free
            .iter()
            .map(|&c| {
                let mut e = vec![0u64; n];
                e[c] = 1;
                let fr = reduce(&alg.pow(&e, pu as u128, &one));
                let d: Vec<u64> = (0..n).map(|j| (fr[j] + pu - e[j]) % pu).collect();
                free.iter().map(|&j| d[j]).collect()
            })
            .collect();
        let fixed: Vec<Vec<u64>> = fp::left_kernel(&frob_rows, free.len(), pu)
            .into_iter()
            .map(|y| {
                let mut v = vec![0u64; n];
                for (k, &c) in free.iter().enumerate() {
                    v[c] = y[k];
                }
                v
            })
            .collect();
        let mut idem = vec![reduce(&one)];
        for b in &fixed {
            let mut next = Vec::new();
            for e in &idem {
                for c in 0..pu {
                    let bc: Vec<u64> = (0..n).map(|j| (b[j] + pu - crate::arith::mul_mod(c, one[j], pu)) % pu).collect();
                    let t = reduce(&alg.pow(&bc, (pu - 1) as u128, &one));
                    let ec: Vec<u64> = (0..n).map(|j| (one[j] + pu - t[j]) % pu).collect();
                    let prod = reduce(&alg.mul(e, &ec));
                    if prod.iter().any(|&x| x != 0) {
                        next.push(prod);
                    }
                }
            }
            idem = next;
        }
        if idem.len() != fixed.len() {
            return Err(Error::Verification(format!("idempotent splitting at {p} found {} of {} primes", idem.len(), fixed.len())));
        }
        let pe = self.from_int(p);
        let mut primes = Vec::new();
        for e in &idem {
            let one_minus: Elt = (0..n).map(|j| Int::from((one[j] + pu - e[j]) % pu)).collect();
            let mut gens: Vec<Elt> = rad.row_vecs();
            gens.push(one_minus);
            gens.push(pe.clone());
            let ideal = self.ideal_from_gens_mod(&gens, p);
            let f = (0..n).filter(|&i| ideal.rows[i][i] == *p).count() as u32;
            let anti = self.anti_uniformizer(&ideal, p);
            primes.push(PrimeIdeal { p: p.clone(), e: 0, f, gen: pe.clone(), gen_poly: None, ideal, anti });
        }
        for k in 0..primes.len() {
            primes[k].e = self.valuation(&primes[k], &pe);
        }
        for k in 0..primes.len() {
            let gen = self.two_element_search(&primes, k)?;
            primes[k].gen = gen;
        }
        Ok(primes)
    }

    /// An element `α ∈ 𝔭` with `(p, α) = 𝔭`.
    fn two_element_search(&self, primes: &[PrimeIdeal], k: usize) -> Result<Elt> {
        let pr = &primes[k];
        let good = |a: &Elt| {
            !self.is_zero(a)
                && self.valuation(pr, a).min(pr.e) == 1
                && primes.iter().enumerate().all(|(j, q)| j == k || !self.ideal_contains(&q.ideal, a))
        };
        for r in &pr.ideal.rows {
            if good(r) {
                return Ok(r.clone());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(big_mod(&pr.p, u64::MAX) ^ k as u64);
        for _ in 0..20_000 {
            let mut a = self.zero();
            for r in &pr.ideal.rows {
                let c = Int::from(rng.gen_range(-3i64..=3));
                a = self.add(&a, &self.scale(r, &c));
            }
            if good(&a) {
                return Ok(a);
            }
        }
        Err(Error::NotFound(format!("two-element generator above {}", pr.p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::IntPoly;

    #[test]
    fn splitting_in_shanks_cubic() {
        let k = NumberField::new(&IntPoly::from_i64s(&[-1, -14, -11, 1])).unwrap();
        let ram = k.factor_rational_prime(&Int::from(163)).unwrap();
        assert_eq!(ram.len(), 1);
        assert_eq!((ram[0].e, ram[0].f), (3, 1));
        let two = k.factor_rational_prime(&Int::from(2)).unwrap();
        assert_eq!(two.iter().map(|q| q.e * q.f).sum::<u32>(), 3);
        // product of the primes with multiplicity is pO
        for p in [2, 3, 5, 7, 163] {
            let fac = k.factor_rational_prime(&Int::from(p)).unwrap();
            let mut prod = k.unit_ideal();
            for q in &fac {
                prod = k.ideal_mul(&prod, &k.prime_power(q, q.e).unwrap()).unwrap();
            }
            assert_eq!(prod, k.principal_ideal(&k.from_int(&Int::from(p))));
        }
    }

    #[test]
    fn index_divisor_primes() {
        // period cubic for ℓ = 163, index 27
        let k = NumberField::new(&IntPoly::from_i64s(&[-4075, -489, 0, 1])).unwrap();
        assert_eq!(k.field_disc(), &Int::from(26569));
        for p in [2, 3, 5, 163] {
            let fac = k.factor_rational_prime(&Int::from(p)).unwrap();
            let mut prod = k.unit_ideal();
            for q in &fac {
                assert_eq!(q.ideal.norm(), &q.norm());
                let (pp, a) = q.two_element();
                assert_eq!(k.ideal_from_gens(&[k.from_int(pp), a.clone()]), q.ideal);
                prod = k.ideal_mul(&prod, &k.prime_power(q, q.e).unwrap()).unwrap();
            }
            assert_eq!(prod, k.principal_ideal(&k.from_int(&Int::from(p))));
        }
    }
}
