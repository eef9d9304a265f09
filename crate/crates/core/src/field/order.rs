//! Orders given by a basis, the p-radical, and maximalization by repeated
//! passage to the ring of multipliers of the p-radical.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Elt;
use crate::arith::fp;
use crate::arith::matrix::{hnf_mod, Matrix};
use crate::arith::{big_mod, mul_mod};
use crate::error::{Error, Result};
use crate::{Int, IntPoly};

pub(crate) struct OrderBasis {
    poly: IntPoly,
    n: usize,
    basis: Matrix<Int>,
    denom: Int,
    pub(crate) mult: Vec<Vec<Elt>>,
}

impl OrderBasis {
    pub(crate) fn new(poly: &IntPoly, basis: Matrix<Int>, denom: Int) -> Self {
        let n = poly.degree().unwrap();
        let mut ob = OrderBasis { poly: poly.clone(), n, basis, denom, mult: vec![] };
        let polys: Vec<IntPoly> = (0..n).map(|i| IntPoly::new(ob.basis.row(i).to_vec())).collect();
        let d2 = &ob.denom * &ob.denom;
        let mut mult = vec![vec![vec![]; n]; n];
        for i in 0..n {
            for j in i..n {
                let prod = (&polys[i] * &polys[j]).rem_monic(&ob.poly);
                let num: Vec<Int> = (0..n).map(|k| prod.coeff(k)).collect();
                let c = ob.power_to_coords_frac(&num, &d2).expect("order not closed under multiplication");
                mult[i][j] = c.clone();
                mult[j][i] = c;
            }
        }
        ob.mult = mult;
        ob
    }

    fn unit_basis(n: usize) -> (Matrix<Int>, Int) {
        (Matrix::identity(n), Int::one())
    }

    /// Coordinates of `num(θ)/den`, `None` if not in the order.
    pub(crate) fn power_to_coords_frac(&self, num: &[Int], den: &Int) -> Option<Elt> {
        let n = self.n;
        let w: Vec<BigRational> =
            (0..n).map(|j| BigRational::new(num.get(j).cloned().unwrap_or_default() * &self.denom, den.clone())).collect();
        let mut c = vec![BigRational::zero(); n];
        for j in (0..n).rev() {
            let mut acc = w[j].clone();
            for i in j + 1..n {
                acc -= &c[i] * BigRational::from_integer(self.basis[(i, j)].clone());
            }
            c[j] = acc / BigRational::from_integer(self.basis[(j, j)].clone());
        }
        c.into_iter().map(|q| q.is_integer().then(|| q.to_integer())).collect()
    }

    pub(crate) fn power_to_coords(&self, g: &IntPoly) -> Option<Elt> {
        let r = g.rem_monic(&self.poly);
        let num: Vec<Int> = (0..self.n).map(|k| r.coeff(k)).collect();
        self.power_to_coords_frac(&num, &Int::one())
    }

    fn mul(&self, a: &[Int], b: &[Int]) -> Elt {
        let mut out = vec![Int::zero(); self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if a[i].is_zero() || b[j].is_zero() {
                    continue;
                }
                let xy = &a[i] * &b[j];
                for (o, m) in out.iter_mut().zip(&self.mult[i][j]) {
                    *o += &xy * m;
                }
            }
        }
        out
    }
}

/// Multiplication table of an order reduced modulo a small prime.
pub(crate) struct ModAlgebra {
    pub(crate) n: usize,
    pub(crate) p: u64,
    table: Vec<Vec<Vec<u64>>>,
}

impl ModAlgebra {
    pub(crate) fn new(mult: &[Vec<Elt>], p: u64) -> Self {
        let n = mult.len();
        let table = mult.iter().map(|row| row.iter().map(|e| e.iter().map(|x| big_mod(x, p)).collect()).collect()).collect();
        ModAlgebra { n, p, table }
    }

    pub(crate) fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0u64; self.n];
        for i in 0..self.n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if b[j] == 0 {
                    continue;
                }
                let xy = mul_mod(a[i], b[j], p);
                for (o, &m) in out.iter_mut().zip(&self.table[i][j]) {
                    *o = (*o + mul_mod(xy, m, p)) % p;
                }
            }
        }
        out
    }

    pub(crate) fn pow(&self, a: &[u64], mut e: u128, one: &[u64]) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut r = one.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        r
    }

    /// Smallest `p^k ≥ n`, the Frobenius power that kills nilpotents.
    pub(crate) fn frob_exponent(&self) -> u128 {
        let mut q = self.p as u128;
        while q < self.n as u128 {
            q *= self.p as u128;
        }
        q
    }
}

/// HNF basis (coordinates on the order basis) of the p-radical
/// `{x : x^{p^k} ∈ pO}`.
pub(crate) fn p_radical(mult: &[Vec<Elt>], one: &[Int], p: u64) -> Matrix<Int> {
    let n = mult.len();
    let alg = ModAlgebra::new(mult, p);
    let one_p: Vec<u64> = one.iter().map(|x| big_mod(x, p)).collect();
    let q = alg.frob_exponent();
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut e = vec![0u64; n];
            e[i] = 1;
            alg.pow(&e, q, &one_p)
        })
        .collect();
    let ker = fp::left_kernel(&rows, n, p);
    let gens: Vec<Vec<Int>> = ker.into_iter().map(|v| v.into_iter().map(Int::from).collect()).collect();
    hnf_mod(&gens, n, &Int::from(p))
}

/// Coordinates of `v` on the rows of a lower triangular basis `h` of a
/// sublattice; `None` if `v` is not in the lattice.
pub(crate) fn lattice_coords(h: &Matrix<Int>, v: &[Int]) -> Option<Vec<Int>> {
    let n = h.rows();
    let mut c = vec![Int::zero(); n];
    let mut rest = v.to_vec();
    for j in (0..n).rev() {
        let (q, r) = rest[j].div_rem(&h[(j, j)]);
        if !r.is_zero() {
            return None;
        }
        for k in 0..=j {
            rest[k] -= &q * &h[(j, k)];
        }
        c[j] = q;
    }
    Some(c)
}

/// One enlargement step at `p`: the ring of multipliers of the p-radical,
/// or `None` if the order is already p-maximal.
fn enlarge(ob: &OrderBasis, one: &[Int], p: u64) -> Option<(Matrix<Int>, Int)> {
    let n = ob.n;
    let rad = p_radical(&ob.mult, one, p);
    // rows k: coordinates (mod p) of ω_k·β_j on the radical basis, all j
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|k| {
            let mut e = vec![Int::zero(); n];
            e[k] = Int::one();
            let mut r = Vec::with_capacity(n * n);
            for j in 0..n {
                let prod = ob.mul(&e, rad.row(j));
                let c = lattice_coords(&rad, &prod).expect("radical is an ideal");
                r.extend(c.iter().map(|x| big_mod(x, p)));
            }
            r
        })
        .collect();
    let ker = fp::left_kernel(&rows, n * n, p);
    if ker.is_empty() {
        return None;
    }
    let gens: Vec<Vec<Int>> = ker.into_iter().map(|v| v.into_iter().map(Int::from).collect()).collect();
    let u = hnf_mod(&gens, n, &Int::from(p));
    let num = u.mul(&ob.basis).hnf();
    let den = &ob.denom * Int::from(p);
    let g = num.row_vecs().iter().flatten().fold(den.clone(), |g, x| g.gcd(x));
    Some((num.map(|x| x / &g), den / g))
}

/// Integral basis of the maximal order of `Q[x]/(f)` as `(B, d)`.
pub(crate) fn maximal_order(f: &IntPoly, disc: &Int) -> Result<(Matrix<Int>, Int)> {
    let n = f.degree().unwrap();
    let (mut basis, mut denom) = OrderBasis::unit_basis(n);
    let primes = crate::arith::factor(disc)?;
    for (p, e) in primes {
        if e < 2 {
            continue;
        }
        let pu = p.to_u64().filter(|&q| crate::arith::is_prime(q)).ok_or_else(|| Error::Maximalization {
            p: p.to_string(),
            detail: "square factor of the discriminant could not be certified prime".into(),
        })?;
        for round in 0.. {
            if round > 64 {
                return Err(Error::Maximalization { p: p.to_string(), detail: "enlargement did not stabilise".into() });
            }
            let ob = OrderBasis::new(f, basis.clone(), denom.clone());
            let one = ob.power_to_coords(&IntPoly::one()).unwrap();
            match enlarge(&ob, &one, pu) {
                Some((b, d)) => {
                    basis = b;
                    denom = d;
                }
                None => break,
            }
        }
    }
    debug_assert!(basis[(0, 0)].is_positive());
    Ok((basis, denom))
}
