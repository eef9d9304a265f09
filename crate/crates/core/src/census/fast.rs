//! Fast classification: one lattice reduction and a handful of cubic
//! residue symbols per prime.
//!
//! With `S` fixed and away from `v`, the relation matrix for `3₁²·𝔳₂` is a
//! fixed block `R0` (valuations and 1-unit logs of the `S`-unit generators)
//! plus a single column of cubic residue symbols modulo `v`. Whether a vector
//! lies in its row space needs only a particular solution against `R0` and
//! the left kernel of `R0`.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{PrimeClassification, SplittingLabels};
use crate::arith::lll::lll_f64;
use crate::arith::modp::{CubicCharacter, ModPoly};
use crate::arith::{big_mod, fp, inv_mod, mul_mod};
use crate::error::Result;
use crate::field::NumberField;
use crate::ray::{LocalLog, SUnitData};
use crate::{Int, IntPoly};

#[derive(Clone, Debug)]
pub struct FastData {
    poly: IntPoly,
    /// Integral basis numerators on the power basis and their denominator.
    basis_num: Vec<Vec<Int>>,
    basis_den: Int,
    emb: Vec<Vec<f64>>,
    /// `mult[i][j]` = coordinates of `ω_i ω_j`.
    mult: Vec<Vec<Vec<i128>>>,
    /// Largest norm of a prime in `S`; smaller `v` go to the generic path.
    s_bound: u64,
    s_rational: Vec<u64>,
    wild: LocalLog,
    r0: Vec<Vec<u64>>,
    r0_left_kernel: Vec<Vec<u64>>,
    c_ell: Vec<u64>,
    ell_functional: Vec<u64>,
    chi_ell: CubicCharacter,
}

impl FastData {
    pub(crate) fn new(f: &NumberField, labels: &SplittingLabels, sunits: &SUnitData) -> Result<Self> {
        let n = f.degree();
        let (b, d) = f.integral_basis();
        let mult: Vec<Vec<Vec<i128>>> = f
            .mult_table()
            .iter()
            .map(|row| row.iter().map(|e| e.iter().map(|x| x.to_i128().unwrap()).collect()).collect())
            .collect();
        let s = sunits.primes();
        let s_bound = s.primes.iter().map(|q| q.norm().to_u64().unwrap()).max().unwrap_or(1);
        let mut s_rational: Vec<u64> = s.primes.iter().map(|q| q.p.to_u64().unwrap()).collect();
        s_rational.dedup();
        let wild = LocalLog::new(f, &labels.three1, 2)?;
        let ell = labels.ell2.p.to_u64().unwrap();
        let ell_functional = labels.ell2.residue_functional().unwrap();
        let chi_ell = CubicCharacter::new(ell);
        let mut r0 = Vec::new();
        let mut c_ell = Vec::new();
        for (g, val) in sunits.generators().iter().zip(sunits.valuations()) {
            let mut row: Vec<u64> = val.iter().map(|x| x.rem_euclid(3) as u64).collect();
            row.extend(wild.eval(f, g).into_iter().map(|x| (3 - x) % 3));
            r0.push(row);
            c_ell.push((3 - residue_char(g, &ell_functional, &chi_ell)) % 3);
        }
        let cols = s.len() + wild.dim();
        let r0_left_kernel = fp::left_kernel(&r0, cols, 3);
        Ok(FastData {
            poly: f.poly().clone(),
            basis_num: b.row_vecs(),
            basis_den: d.clone(),
            emb: f.basis_embeddings().to_vec(),
            mult,
            s_bound,
            s_rational,
            wild,
            r0,
            r0_left_kernel,
            c_ell,
            ell_functional,
            chi_ell,
        })
        .inspect(|fd| {
            debug_assert_eq!(fd.basis_num.len(), n);
        })
    }

    /// Classifies `v`, or `None` when the generic path has to decide.
    pub(crate) fn classify(&self, f: &NumberField, sunits: &SUnitData, v: u64) -> Result<Option<PrimeClassification>> {
        if v % 3 != 1 {
            return Ok(Some(PrimeClassification::outside(v)));
        }
        if v <= self.s_bound {
            return Ok(None);
        }
        // exactly one root mod v means cycle type (3,1)
        let fm = ModPoly::from_int(&self.poly, v);
        let x = ModPoly::x(v);
        let g = fm.gcd(&x.pow_mod(v as u128, &fm).sub(&x));
        if g.degree() != Some(1) {
            return Ok(Some(PrimeClassification::outside(v)));
        }
        let g = g.monic();
        let r = (v - g.coeffs()[0]) % v;
        let n = self.basis_num.len();
        let den_inv = inv_mod(big_mod(&self.basis_den, v), v).unwrap();
        // residue map O → O/𝔳₂ = F_v
        let phi: Vec<u64> = self
            .basis_num
            .iter()
            .map(|row| {
                let val = row.iter().rev().fold(0u64, |acc, c| (mul_mod(acc, r, v) + big_mod(c, v)) % v);
                mul_mod(val, den_inv, v)
            })
            .collect();
        // 𝔳₁ = (v, q(θ)) with q = f/(x - r)
        let (q, _) = fm.divrem(&ModPoly::new(v, vec![(v - r) % v, 1]));
        let mut p = q.coeffs().to_vec();
        p.resize(n, 0);
        let k = self.power_to_basis_mod(&p, v);
        let j = (0..n).rev().find(|&i| k[i] != 0).unwrap();
        let s = inv_mod(k[j], v).unwrap();
        let k: Vec<i128> = k.iter().map(|&c| mul_mod(c, s, v) as i128).collect();
        let lat: Vec<Vec<i128>> = (0..n)
            .map(|i| {
                if i == j {
                    k.clone()
                } else {
                    let mut e = vec![0i128; n];
                    e[i] = v as i128;
                    e
                }
            })
            .collect();
        let real: Vec<Vec<f64>> = lat
            .iter()
            .map(|b| (0..n).map(|m| (0..n).map(|i| b[i] as f64 * self.emb[i][m]).sum()).collect())
            .collect();
        let t = lll_f64(&real);
        let red: Vec<Vec<i128>> = t
            .iter()
            .map(|row| (0..n).map(|c| (0..n).map(|s| row[s] as i128 * lat[s][c]).sum()).collect())
            .collect();
        let v3 = (v as i128).pow(3);
        let chi_v = CubicCharacter::new(v);
        for radius in 1..=2i64 {
            for c in combos(n, radius) {
                let gamma: Vec<i128> =
                    (0..n).map(|col| (0..n).map(|s| c[s] as i128 * red[s][col]).sum()).collect();
                if gamma.iter().all(|&x| x == 0) {
                    continue;
                }
                let big: Vec<Int> = gamma.iter().map(|&x| Int::from(x)).collect();
                let norm = match self.norm_i128(&gamma) {
                    Some(nm) => Int::from(nm),
                    None => f.norm(&big),
                };
                let (cof, rem) = norm.div_rem(&Int::from(v3));
                if !rem.is_zero() || cof.is_zero() {
                    continue;
                }
                if !self.smooth(&cof) {
                    continue;
                }
                let Some(d) = sunits.primes().factor_cofactor(f, &big, &cof, None) else {
                    continue;
                };
                let mut a0: Vec<u64> = d.iter().map(|x| (-x).rem_euclid(3) as u64).collect();
                a0.extend(self.wild.eval(f, &big));
                let a_ell = residue_char(&big, &self.ell_functional, &self.chi_ell);
                let a_v = residue_char(&big, &phi, &chi_v);
                let taubar = self.member(&self.c_ell, &a0, a_ell);
                let c_v: Vec<u64> =
                    sunits.generators().iter().map(|g| (3 - residue_char(g, &phi, &chi_v)) % 3).collect();
                let lambda = !self.member(&c_v, &a0, a_v);
                return Ok(Some(PrimeClassification::inside(v, lambda, taubar)));
            }
        }
        Ok(None)
    }

    /// Whether `(a0, a1)` lies in the row space of `[R0 | c]` over `F_3`.
    fn member(&self, c: &[u64], a0: &[u64], a1: u64) -> bool {
        let Some(y) = fp::solve_left(&self.r0, a0, 3) else {
            return false;
        };
        if self.r0_left_kernel.iter().any(|k| fp::dot(k, c, 3) != 0) {
            return true;
        }
        fp::dot(&y, c, 3) == a1 % 3
    }

    fn smooth(&self, n: &Int) -> bool {
        let mut m = n.clone();
        if m < Int::zero() {
            m = -m;
        }
        for &p in &self.s_rational {
            let p = Int::from(p);
            while m.is_multiple_of(&p) {
                m /= &p;
            }
        }
        m == Int::from(1)
    }

    /// Integral-basis coordinates mod `v` of an element given on the power basis.
    fn power_to_basis_mod(&self, p: &[u64], v: u64) -> Vec<u64> {
        let n = p.len();
        let d = big_mod(&self.basis_den, v);
        let mut c = vec![0u64; n];
        for j in (0..n).rev() {
            let mut acc = mul_mod(d, p[j], v);
            for i in j + 1..n {
                let t = mul_mod(c[i], big_mod(&self.basis_num[i][j], v), v);
                acc = (acc + v - t) % v;
            }
            let bjj = big_mod(&self.basis_num[j][j], v);
            c[j] = mul_mod(acc, inv_mod(bjj, v).unwrap(), v);
        }
        c
    }

    /// `N(γ)` by cofactor expansion in checked 128-bit arithmetic.
    fn norm_i128(&self, g: &[i128]) -> Option<i128> {
        let n = g.len();
        let mut m = vec![vec![0i128; n]; n];
        for (i, gi) in g.iter().enumerate() {
            if *gi == 0 {
                continue;
            }
            for j in 0..n {
                for t in 0..n {
                    m[j][t] = m[j][t].checked_add(gi.checked_mul(self.mult[i][j][t])?)?;
                }
            }
        }
        det_checked(&m)
    }
}

fn residue_char(g: &[Int], functional: &[u64], chi: &CubicCharacter) -> u64 {
    let q = chi.modulus();
    let r = g.iter().zip(functional).fold(0u64, |s, (c, f)| (s + mul_mod(big_mod(c, q), *f, q)) % q);
    chi.eval(r) as u64
}

/// Coefficient vectors with sup norm exactly `radius`, first nonzero entry
/// positive.
fn combos(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let side = (2 * radius + 1) as usize;
    let mut out = Vec::new();
    for code in 0..side.pow(n as u32) {
        let mut c = Vec::with_capacity(n);
        let mut t = code;
        for _ in 0..n {
            c.push((t % side) as i64 - radius);
            t /= side;
        }
        if c.iter().map(|x| x.abs()).max() != Some(radius) {
            continue;
        }
        if c.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            continue;
        }
        out.push(c);
    }
    out
}

fn det_checked(m: &[Vec<i128>]) -> Option<i128> {
    let n = m.len();
    if n == 1 {
        return Some(m[0][0]);
    }
    let mut total: i128 = 0;
    for c in 0..n {
        if m[0][c] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| *x).collect()).collect();
        let term = m[0][c].checked_mul(det_checked(&minor)?)?;
        total = if c % 2 == 0 { total.checked_add(term)? } else { total.checked_sub(term)? };
    }
    Some(total)
}
