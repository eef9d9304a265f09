//! Totally real number fields of degree ≤ 4 with their maximal orders.
//!
//! Elements are coordinate vectors on the integral basis `ω_0 = 1, …, ω_{n-1}`.
//! The basis is stored as a lower triangular integer matrix `B` and a
//! denominator `d`, with `ω_i = (Σ_j B_ij θ^j) / d`.

mod construct;
mod galois;
mod ideal;
mod order;

pub use construct::{
    cubic_subfield, diagonal_cubics, period_cubic, quartic_field_search, shanks_param, shanks_poly,
};
pub use galois::{quartic_galois_tag, quartic_resolvent, QuarticGaloisTag};
pub use ideal::{IdealHNF, PrimeIdeal};
pub(crate) use order::lattice_coords;

use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::matrix::Matrix;
use crate::error::{Error, Result};
use crate::{Int, IntPoly};

/// Field element: coordinates on the integral basis.
pub type Elt = Vec<Int>;

#[derive(Clone)]
pub struct NumberField {
    poly: IntPoly,
    n: usize,
    basis: Matrix<Int>,
    denom: Int,
    /// Row `j` holds the coordinates of `θ^j`.
    power_coords: Matrix<Int>,
    /// `mult[i][j]` = coordinates of `ω_i ω_j`.
    mult: Vec<Vec<Elt>>,
    traces: Vec<Int>,
    trace_gram: Matrix<Int>,
    field_disc: Int,
    poly_disc: Int,
    index: Int,
    roots: Vec<f64>,
    /// `emb[i][k] = σ_k(ω_i)`.
    emb: Vec<Vec<f64>>,
    id: u64,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("poly", &self.poly.to_string())
            .field("field_disc", &self.field_disc)
            .field("index", &self.index)
            .finish()
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

impl NumberField {
    /// Builds the field defined by a monic irreducible totally real cubic or
    /// quartic, computing its maximal order.
    pub fn new(f: &IntPoly) -> Result<Self> {
        let n = f.degree().unwrap_or(0);
        if !(3..=4).contains(&n) {
            return Err(Error::DegreeOutOfRange(n));
        }
        Self::build(f)
    }

    /// Same as [`NumberField::new`] but also accepts quadratic fields, which
    /// are convenient as small test cases.
    pub fn new_small_degree(f: &IntPoly) -> Result<Self> {
        let n = f.degree().unwrap_or(0);
        if !(2..=4).contains(&n) {
            return Err(Error::DegreeOutOfRange(n));
        }
        Self::build(f)
    }

    fn build(f: &IntPoly) -> Result<Self> {
        if !f.is_monic() {
            return Err(Error::NotMonic);
        }
        let n = f.degree().unwrap();
        let poly_disc = f.discriminant();
        if poly_disc.is_zero() {
            return Err(Error::Reducible);
        }
        let fq = f.to_rational();
        if fq.count_real_roots() != n {
            return Err(Error::NotTotallyReal);
        }
        let roots = fq.real_roots();
        if has_integer_factor(f, &roots) {
            return Err(Error::Reducible);
        }
        let (basis, denom) = order::maximal_order(f, &poly_disc)?;
        let field = Self::from_basis(f.clone(), basis, denom, poly_disc, roots)?;
        Ok(field)
    }

    fn from_basis(poly: IntPoly, basis: Matrix<Int>, denom: Int, poly_disc: Int, roots: Vec<f64>) -> Result<Self> {
        let n = poly.degree().unwrap();
        let ob = order::OrderBasis::new(&poly, basis.clone(), denom.clone());
        let mult = ob.mult.clone();
        let power_coords = Matrix::from_rows(
            (0..n)
                .map(|j| ob.power_to_coords(&IntPoly::monomial(Int::one(), j)).expect("θ^j integral"))
                .collect(),
        );
        let one = power_coords.row(0).to_vec();
        let traces: Vec<Int> = (0..n)
            .map(|i| {
                // trace of multiplication by ω_i
                (0..n).map(|j| mult[i][j][j].clone()).fold(Int::zero(), |a, b| a + b)
            })
            .collect();
        let mut trace_gram = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                trace_gram[(i, j)] = dot(&mult[i][j], &traces);
            }
        }
        let field_disc = trace_gram.det();
        let ratio = &poly_disc / &field_disc;
        let index = crate::arith::exact_sqrt(&ratio)
            .filter(|_| (&poly_disc % &field_disc).is_zero())
            .ok_or_else(|| Error::Verification("disc(f)/d_K is not a square".into()))?;
        let emb: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                roots
                    .iter()
                    .map(|&r| {
                        let mut acc = 0.0;
                        let mut pw = 1.0;
                        for j in 0..n {
                            acc += basis[(i, j)].to_f64().unwrap() * pw;
                            pw *= r;
                        }
                        acc / denom.to_f64().unwrap()
                    })
                    .collect()
            })
            .collect();
        let mut h = std::collections::hash_map::DefaultHasher::new();
        poly.coeffs().hash(&mut h);
        let field = NumberField {
            poly,
            n,
            basis,
            denom,
            power_coords,
            mult,
            traces,
            trace_gram,
            field_disc,
            poly_disc,
            index,
            roots,
            emb,
            id: h.finish(),
        };
        debug_assert_eq!(one, field.one());
        Ok(field)
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn field_disc(&self) -> &Int {
        &self.field_disc
    }

    pub fn poly_disc(&self) -> &Int {
        &self.poly_disc
    }

    /// `[O_K : Z[θ]]`.
    pub fn index(&self) -> &Int {
        &self.index
    }

    /// `(r1, r2)`; always `(n, 0)` for the fields constructed here.
    pub fn signature(&self) -> (usize, usize) {
        (self.n, 0)
    }

    pub(crate) fn id(&self) -> u64 {
        self.id
    }

    /// Integral basis as `(B, d)` with `ω_i = (Σ_j B_ij θ^j)/d`.
    pub fn integral_basis(&self) -> (&Matrix<Int>, &Int) {
        (&self.basis, &self.denom)
    }

    /// Integral basis as rational coordinates on the power basis.
    pub fn integral_basis_rational(&self) -> Matrix<BigRational> {
        self.basis.map(|x| BigRational::new(x.clone(), self.denom.clone()))
    }

    /// Real roots of the defining polynomial, ascending; the `k`-th
    /// embedding sends `θ` to `roots()[k]`.
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn trace_gram(&self) -> &Matrix<Int> {
        &self.trace_gram
    }

    pub fn mult_table(&self) -> &[Vec<Elt>] {
        &self.mult
    }

    /// Minkowski bound `n!/nⁿ · √|d_K|` for a totally real field.
    pub fn minkowski_bound(&self) -> f64 {
        let n = self.n as f64;
        let fact: f64 = (1..=self.n).map(|k| k as f64).product();
        fact / n.powf(n) * self.field_disc.to_f64().unwrap().abs().sqrt()
    }

    // ---- elements ----

    pub fn zero(&self) -> Elt {
        vec![Int::zero(); self.n]
    }

    pub fn one(&self) -> Elt {
        self.power_coords.row(0).to_vec()
    }

    pub fn from_int(&self, k: &Int) -> Elt {
        self.one().iter().map(|c| c * k).collect()
    }

    pub fn theta(&self) -> Elt {
        self.power_coords.row(1).to_vec()
    }

    /// The element `g(θ)`.
    pub fn from_poly(&self, g: &IntPoly) -> Elt {
        let r = g.rem_monic(&self.poly);
        let mut out = self.zero();
        for (j, c) in r.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.power_coords.row(j)) {
                *o += c * b;
            }
        }
        out
    }

    /// Power-basis coordinates `(numerators, denominator)` of an element.
    pub fn to_power_basis(&self, a: &[Int]) -> (Vec<Int>, Int) {
        let num = self.basis.vec_mul(a);
        let g = num.iter().fold(self.denom.clone(), |g, x| g.gcd(x));
        (num.iter().map(|x| x / &g).collect(), &self.denom / &g)
    }

    /// Coordinates of `g(θ)/den` if that element is integral.
    pub fn coords_of_power(&self, num: &[Int], den: &Int) -> Option<Elt> {
        let ob = order::OrderBasis::new(&self.poly, self.basis.clone(), self.denom.clone());
        ob.power_to_coords_frac(num, den)
    }

    pub fn add(&self, a: &[Int], b: &[Int]) -> Elt {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &[Int], b: &[Int]) -> Elt {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(&self, a: &[Int], k: &Int) -> Elt {
        a.iter().map(|x| x * k).collect()
    }

    pub fn neg(&self, a: &[Int]) -> Elt {
        a.iter().map(|x| -x).collect()
    }

    pub fn mul(&self, a: &[Int], b: &[Int]) -> Elt {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (o, m) in out.iter_mut().zip(&self.mult[i][j]) {
                    if !m.is_zero() {
                        *o += &xy * m;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[Int], mut e: u64) -> Elt {
        let mut base = a.to_vec();
        let mut r = self.one();
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

    /// Matrix of multiplication by `a`: row `i` holds `a·ω_i`.
    pub fn mul_matrix(&self, a: &[Int]) -> Matrix<Int> {
        let rows = (0..self.n)
            .map(|i| {
                let mut e = self.zero();
                e[i] = Int::one();
                self.mul(a, &e)
            })
            .collect();
        Matrix::from_rows(rows)
    }

    pub fn norm(&self, a: &[Int]) -> Int {
        self.mul_matrix(a).det()
    }

    pub fn trace(&self, a: &[Int]) -> Int {
        dot(a, &self.traces)
    }

    pub fn is_zero(&self, a: &[Int]) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    /// Real embeddings `σ_k(a)`.
    pub fn embed(&self, a: &[Int]) -> Vec<f64> {
        (0..self.n)
            .map(|k| a.iter().enumerate().map(|(i, x)| x.to_f64().unwrap() * self.emb[i][k]).sum())
            .collect()
    }

    /// Embeddings of the basis: `[i][k] = σ_k(ω_i)`.
    pub fn basis_embeddings(&self) -> &[Vec<f64>] {
        &self.emb
    }

    /// `a / b` when the quotient is integral.
    pub fn div_exact(&self, a: &[Int], b: &[Int]) -> Option<Elt> {
        // solve c·M_b = a over Q
        let m = self.mul_matrix(b);
        let n = self.n;
        let mut aug: Vec<Vec<BigRational>> = (0..n)
            .map(|j| {
                let mut r: Vec<BigRational> = (0..n).map(|i| BigRational::from_integer(m[(i, j)].clone())).collect();
                r.push(BigRational::from_integer(a[j].clone()));
                r
            })
            .collect();
        let sol = solve_rational(&mut aug, n)?;
        sol.into_iter().map(|q| q.is_integer().then(|| q.to_integer())).collect()
    }

    /// Whether every coordinate of `a` is divisible by `k`.
    pub fn divisible_by(&self, a: &[Int], k: &Int) -> bool {
        a.iter().all(|x| x.is_multiple_of(k))
    }

    pub fn reduce_mod(&self, a: &[Int], m: &Int) -> Elt {
        a.iter().map(|x| x.mod_floor(m)).collect()
    }
}

pub(crate) fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Int::zero(), |s, t| s + t)
}

/// Gaussian elimination on an augmented `n × (n+1)` system; `None` when
/// singular.
pub(crate) fn solve_rational(aug: &mut [Vec<BigRational>], n: usize) -> Option<Vec<BigRational>> {
    for c in 0..n {
        let pr = (c..n).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(c, pr);
        let piv = aug[c][c].clone();
        for x in aug[c].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..n {
            if r != c && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                for j in c..=n {
                    let t = &f * &aug[c][j];
                    aug[r][j] -= t;
                }
            }
        }
    }
    Some(aug.iter().map(|r| r[n].clone()).collect())
}

/// Detects a monic integer factor of degree ≤ n/2 from the numerical roots,
/// each candidate confirmed by exact division.
fn has_integer_factor(f: &IntPoly, roots: &[f64]) -> bool {
    let n = roots.len();
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > n / 2 {
            continue;
        }
        // coefficients of ∏ (x - r_i) over the subset
        let mut c = vec![1.0f64];
        for (i, &r) in roots.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let mut next = vec![0.0; c.len() + 1];
                for (j, &a) in c.iter().enumerate() {
                    next[j + 1] += a;
                    next[j] -= r * a;
                }
                c = next;
            }
        }
        if c.iter().any(|x| (x - x.round()).abs() > 1e-6 * x.abs().max(1.0)) {
            continue;
        }
        let g = IntPoly::new(c.iter().map(|x| BigInt::from(x.round() as i64)).collect());
        if f.rem_monic(&g).is_zero() {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shanks_cubic_has_index_one() {
        let k = NumberField::new(&IntPoly::from_i64s(&[-1, -4, -1, 1])).unwrap();
        assert_eq!(k.field_disc(), &Int::from(169));
        assert_eq!(k.index(), &Int::one());
    }

    #[test]
    fn contract_errors() {
        assert!(matches!(NumberField::new(&IntPoly::from_i64s(&[-5, 0, 1])), Err(Error::DegreeOutOfRange(2))));
        assert!(matches!(NumberField::new(&IntPoly::from_i64s(&[-2, 0, 0, 1])), Err(Error::NotTotallyReal)));
        assert!(matches!(NumberField::new(&IntPoly::from_i64s(&[0, -1, 0, 1])), Err(Error::Reducible)));
        assert!(matches!(NumberField::new(&IntPoly::from_i64s(&[4, 0, -5, 0, 1])), Err(Error::Reducible)));
        assert!(matches!(NumberField::new(&IntPoly::from_i64s(&[1, 2, 3, 2])), Err(Error::NotMonic)));
    }

    #[test]
    fn element_arithmetic() {
        let k = NumberField::new(&IntPoly::from_i64s(&[-1, -14, -11, 1])).unwrap();
        let t = k.theta();
        let t3 = k.pow(&t, 3);
        // θ³ = 11θ² + 14θ + 1
        let rhs = k.from_poly(&IntPoly::from_i64s(&[1, 14, 11]));
        assert_eq!(t3, rhs);
        assert_eq!(k.norm(&t), Int::one());
        assert_eq!(k.trace(&t), Int::from(11));
        let q = k.div_exact(&k.mul(&t, &rhs), &t).unwrap();
        assert_eq!(q, rhs);
    }
}
