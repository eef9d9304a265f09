//! Galois group of an irreducible quartic from its discriminant and cubic
//! resolvent (with the Kappe–Warren test separating `C4` from `D4`).

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::is_square;
use crate::{Int, IntPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuarticGaloisTag {
    A4,
    S4,
    V4,
    C4,
    D4,
}

impl fmt::Display for QuarticGaloisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Cubic resolvent `x³ − b x² + (ac − 4d) x − (a²d − 4bd + c²)` of
/// `x⁴ + a x³ + b x² + c x + d`, whose roots are `α₁α₂ + α₃α₄` and conjugates.
pub fn quartic_resolvent(f: &IntPoly) -> IntPoly {
    assert!(f.degree() == Some(4) && f.is_monic(), "monic quartic expected");
    let (d, c, b, a) = (f.coeff(0), f.coeff(1), f.coeff(2), f.coeff(3));
    IntPoly::new(vec![
        -(&a * &a * &d - Int::from(4) * &b * &d + &c * &c),
        &a * &c - Int::from(4) * &d,
        -b,
        Int::from(1),
    ])
}

/// Integer roots of a monic integer polynomial with nonzero discriminant.
pub(crate) fn integer_roots(g: &IntPoly) -> Vec<Int> {
    let mut out: Vec<Int> = g
        .to_rational()
        .real_roots()
        .into_iter()
        .filter(|r| r.is_finite())
        .flat_map(|r| {
            let k = r.round() as i128;
            [k - 1, k, k + 1]
        })
        .map(Int::from)
        .filter(|k| g.eval(k).is_zero())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Galois group of a monic irreducible quartic.
pub fn quartic_galois_tag(f: &IntPoly) -> QuarticGaloisTag {
    let disc = f.discriminant();
    let res = quartic_resolvent(f);
    let roots = integer_roots(&res);
    let square = disc > Int::zero() && is_square(&disc);
    match (roots.len(), square) {
        (0, true) => QuarticGaloisTag::A4,
        (0, false) => QuarticGaloisTag::S4,
        (1, _) => {
            let r = &roots[0];
            let (d, b, a) = (f.coeff(0), f.coeff(2), f.coeff(3));
            // both quadratics must split over Q(√disc)
            let splits = |q: Int| q.is_zero() || is_square(&q) || is_square(&(q * &disc));
            if splits(r * r - Int::from(4) * &d) && splits(&a * &a - Int::from(4) * (&b - r)) {
                QuarticGaloisTag::C4
            } else {
                QuarticGaloisTag::D4
            }
        }
        _ => QuarticGaloisTag::V4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(c: &[i64]) -> QuarticGaloisTag {
        quartic_galois_tag(&IntPoly::from_i64s(c))
    }

    #[test]
    fn standard_examples() {
        assert_eq!(tag(&[1, 0, 0, 0, 1]), QuarticGaloisTag::V4);
        assert_eq!(tag(&[-1, -1, 0, 0, 1]), QuarticGaloisTag::S4);
        assert_eq!(tag(&[9, 2, -7, -1, 1]), QuarticGaloisTag::A4);
        // x⁴ + x³ + x² + x + 1, the fifth cyclotomic polynomial
        assert_eq!(tag(&[1, 1, 1, 1, 1]), QuarticGaloisTag::C4);
        // x⁴ - 2
        assert_eq!(tag(&[-2, 0, 0, 0, 1]), QuarticGaloisTag::D4);
        assert_eq!(
            quartic_resolvent(&IntPoly::from_i64s(&[1, 0, 0, 0, 1])),
            IntPoly::from_i64s(&[0, -4, 0, 1])
        );
    }
}
