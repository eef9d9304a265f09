//! Dense univariate polynomials, coefficients stored lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};

use crate::arith::matrix::Matrix;
use crate::scalar::{Ring, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c·x^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn x() -> Self {
        Poly::monomial(T::one(), 1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// `f(g(x))` by Horner's rule.
    pub fn compose(&self, g: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * g) + &Poly::constant(c.clone()))
    }

    /// Division by a monic polynomial; valid over any ring.
    pub fn divrem_monic(&self, d: &Self) -> (Self, Self) {
        assert!(d.is_monic(), "divisor must be monic");
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = r[i].clone();
            if c.is_zero() {
                continue;
            }
            q[i - dd] = c.clone();
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = r[i - dd + j].clone() - c.clone() * dj.clone();
            }
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem_monic(&self, d: &Self) -> Self {
        self.divrem_monic(d).1
    }
}

impl<T: Ring + FromPrimitive> Poly<T> {
    pub fn from_i64s(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&a| T::from_i64(a).unwrap()).collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_usize(i).unwrap())
                .collect(),
        )
    }
}

impl<T: Ring> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<T: Ring> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<T: Ring> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, o: &Poly<T>) -> Poly<T> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }
}

impl<T: Ring> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> Poly<T> {
    pub fn content(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() {
            return self.clone();
        }
        let mut p = Poly::new(self.coeffs.iter().map(|a| a.clone() / c.clone()).collect());
        if p.lead().is_negative() {
            p = -&p;
        }
        p
    }

    /// Resultant as the determinant of the Sylvester matrix.
    pub fn resultant(&self, g: &Self) -> T {
        let (m, n) = match (self.degree(), g.degree()) {
            (Some(m), Some(n)) => (m, n),
            _ => return T::zero(),
        };
        if m == 0 && n == 0 {
            return T::one();
        }
        let size = m + n;
        let mut s = Matrix::zeros(size, size);
        for i in 0..n {
            for (j, c) in self.coeffs.iter().rev().enumerate() {
                s[(i, i + j)] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in g.coeffs.iter().rev().enumerate() {
                s[(n + i, i + j)] = c.clone();
            }
        }
        s.det()
    }

    /// `disc(f) = (-1)^{n(n-1)/2} res(f, f') / lc(f)`.
    pub fn discriminant(&self) -> T {
        let n = self.degree().expect("discriminant of zero polynomial");
        if n == 0 {
            return T::zero();
        }
        let r = self.resultant(&self.derivative()) / self.lead();
        if (n * (n - 1) / 2) % 2 == 1 {
            -r
        } else {
            r
        }
    }

    pub fn to_rational(&self) -> Poly<BigRational> {
        self.map(|c| BigRational::from_integer(c.to_big()))
    }

    pub fn to_big(&self) -> Poly<BigInt> {
        self.map(|c| c.to_big())
    }
}

impl Poly<BigRational> {
    pub fn monic(&self) -> Self {
        let l = self.lead();
        Poly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let l = d.lead();
        let dm = d.monic();
        let (q, r) = self.divrem_monic(&dm);
        (Poly::new(q.coeffs.iter().map(|c| c / &l).collect()), r)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Sturm sequence `f, f', -rem(f, f'), ...`.
    fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].divrem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(-&r);
        }
        seq
    }

    fn sign_changes(values: impl Iterator<Item = BigRational>) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for v in values {
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let seq = self.sturm_sequence();
        let at_neg = Self::sign_changes(seq.iter().map(|p| {
            let l = p.lead();
            if p.degree().unwrap_or(0) % 2 == 1 {
                -l
            } else {
                l
            }
        }));
        let at_pos = Self::sign_changes(seq.iter().map(|p| p.lead()));
        at_neg - at_pos
    }

    /// Number of distinct roots in the half-open interval `(a, b]`.
    fn count_in(seq: &[Self], a: &BigRational, b: &BigRational) -> usize {
        let va = Self::sign_changes(seq.iter().map(|p| p.eval(a)));
        let vb = Self::sign_changes(seq.iter().map(|p| p.eval(b)));
        va - vb
    }

    /// Real roots of a squarefree polynomial, isolated exactly and refined by
    /// bisection to about 2^-60 relative precision.
    pub fn real_roots(&self) -> Vec<f64> {
        let seq = self.sturm_sequence();
        // Cauchy bound
        let l = self.lead().abs();
        let bound = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &l)
            .fold(BigRational::zero(), |m, c| if c > m { c } else { m })
            + BigRational::one();
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((a, b)) = stack.pop() {
            let k = Self::count_in(&seq, &a, &b);
            if k == 0 {
                continue;
            }
            if k == 1 {
                out.push(self.refine_root(&seq, a, b));
                continue;
            }
            let mid = (&a + &b) / BigRational::from_integer(2.into());
            stack.push((a, mid.clone()));
            stack.push((mid, b));
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }

    fn refine_root(&self, seq: &[Self], mut a: BigRational, mut b: BigRational) -> f64 {
        let two = BigRational::from_integer(2.into());
        for _ in 0..200 {
            let width = (&b - &a).to_f64();
            let scale = a.to_f64().abs().max(b.to_f64().abs()).max(1.0);
            if width <= scale * 1e-18 {
                break;
            }
            let mid = (&a + &b) / &two;
            if Self::count_in(seq, &a, &mid) == 1 {
                b = mid;
            } else {
                a = mid;
            }
            // keep denominators small
            a = round_down(&a);
            b = round_up(&b);
        }
        ((&a + &b) / &two).to_f64()
    }
}

trait ToF64 {
    fn to_f64(&self) -> f64;
}

impl ToF64 for BigRational {
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn dyadic(x: &BigRational, up: bool) -> BigRational {
    let denom = BigInt::one() << 80u32;
    let scaled = x * BigRational::from_integer(denom.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() };
    n / BigRational::from_integer(denom)
}

fn round_down(x: &BigRational) -> BigRational {
    dyadic(x, false)
}

fn round_up(x: &BigRational) -> BigRational {
    dyadic(x, true)
}

impl<T: Ring + fmt::Display + Signed> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: Ring + fmt::Display + Signed> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Poly<i64>;

    #[test]
    fn discriminant_of_shanks_cubic_is_163_squared() {
        let f = P::from_i64s(&[-1, -14, -11, 1]);
        assert_eq!(f.discriminant(), 26569);
    }

    #[test]
    fn discriminant_textbook_identities() {
        // x^2 - d
        assert_eq!(P::from_i64s(&[-7, 0, 1]).discriminant(), 28);
        // x^3 + px + q at (p, q) = (-1, 0): -4p^3 - 27q^2 = 4
        assert_eq!(P::from_i64s(&[0, -1, 0, 1]).discriminant(), 4);
        assert_eq!(P::from_i64s(&[3, 5, 0, 1]).discriminant(), -4 * 125 - 27 * 9);
    }

    #[test]
    fn discriminant_zero_iff_repeated_factor() {
        let f = &P::from_i64s(&[-2, 1]) * &P::from_i64s(&[-2, 1]);
        let f = &f * &P::from_i64s(&[1, 0, 1]);
        assert_eq!(f.discriminant(), 0);
    }

    #[test]
    fn divrem_monic_reconstructs() {
        let f = P::from_i64s(&[5, -3, 0, 2, 7]);
        let d = P::from_i64s(&[1, 1, 1]);
        let (q, r) = f.divrem_monic(&d);
        assert_eq!(&(&q * &d) + &r, f);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn sturm_counts_real_roots() {
        let f = Poly::<i64>::from_i64s(&[-1, -14, -11, 1]).to_rational();
        assert_eq!(f.count_real_roots(), 3);
        let g = Poly::<i64>::from_i64s(&[1, 0, 0, 0, 1]).to_rational();
        assert_eq!(g.count_real_roots(), 0);
        let roots = Poly::<i64>::from_i64s(&[-2, 0, 1]).to_rational().real_roots();
        assert_eq!(roots.len(), 2);
        assert!((roots[1] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn display_matches_usual_notation() {
        let f = P::from_i64s(&[-1, -14, -11, 1]);
        assert_eq!(f.to_string(), "x^3 - 11*x^2 - 14*x - 1");
    }
}
