//! The cyclic cubic field of prime conductor ℓ, the tetrahedral quartic
//! attached to it, and diagonal cubic fields of composite conductor.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::galois::{quartic_galois_tag, quartic_resolvent, QuarticGaloisTag};
use super::NumberField;
use crate::arith::{cornacchia_4l, exact_sqrt, is_prime, is_prime_big, is_square, pow_mod};
use crate::error::{Error, Result};
use crate::{Int, IntPoly};

/// The `a ≥ −1` with `a² + 3a + 9 = ℓ`, if any.
pub fn shanks_param(ell: &Int) -> Option<Int> {
    let d = ell * 4 - 27;
    let r = exact_sqrt(&d)?;
    let twice = r - Int::from(3);
    if twice.is_odd() {
        return None;
    }
    let a = twice / 2;
    (a >= -Int::one()).then_some(a)
}

/// `x³ − a x² − (a+3) x − 1`.
pub fn shanks_poly(a: &Int) -> IntPoly {
    IntPoly::new(vec![-Int::one(), -(a + Int::from(3)), -a.clone(), Int::one()])
}

/// `x³ − 3ℓ x − ℓ a` with `4ℓ = a² + 27b²`, `a ≡ 1 (mod 3)`.
pub fn period_cubic(ell: &Int) -> Result<IntPoly> {
    let (a, _) = cornacchia_4l(ell)?;
    Ok(IntPoly::new(vec![-(ell * &a), -(ell * Int::from(3)), Int::zero(), Int::one()]))
}

fn check_conductor(ell: &Int) -> Result<()> {
    if !is_prime_big(ell) {
        return Err(Error::NotPrime(ell.to_string()));
    }
    if ell.mod_floor(&Int::from(3)) != Int::one() {
        return Err(Error::InvalidArgument(format!("{ell} is not 1 mod 3")));
    }
    Ok(())
}

/// The cubic subfield `L` of `Q(ζ_ℓ)`, defined by the Shanks polynomial when
/// ℓ is a Shanks prime and by the period cubic otherwise.
pub fn cubic_subfield(ell: &Int) -> Result<NumberField> {
    check_conductor(ell)?;
    let f = match shanks_param(ell) {
        Some(a) => shanks_poly(&a),
        None => period_cubic(ell)?,
    };
    let k = NumberField::new(&f)?;
    let want = ell * ell;
    if k.field_disc() != &want {
        return Err(Error::Verification(format!("cubic field of conductor {ell} has disc {}", k.field_disc())));
    }
    Ok(k)
}

fn quartic_disc_i128(a: i128, b: i128, c: i128, d: i128) -> Option<i128> {
    // discriminant of x⁴ + a x³ + b x² + c x + d
    let t = |xs: &[i128]| -> Option<i128> { xs.iter().try_fold(1i128, |acc, &x| acc.checked_mul(x)) };
    let terms: [(i128, Option<i128>); 16] = [
        (256, t(&[d, d, d])),
        (-192, t(&[a, c, d, d])),
        (-128, t(&[b, b, d, d])),
        (144, t(&[b, c, c, d])),
        (-27, t(&[c, c, c, c])),
        (144, t(&[a, a, b, d, d])),
        (-6, t(&[a, a, c, c, d])),
        (-80, t(&[a, b, b, c, d])),
        (18, t(&[a, b, c, c, c])),
        (16, t(&[b, b, b, b, d])),
        (-4, t(&[b, b, b, c, c])),
        (-27, t(&[a, a, a, a, d, d])),
        (18, t(&[a, a, a, b, c, d])),
        (-4, t(&[a, a, a, c, c, c])),
        (-4, t(&[a, a, b, b, b, d])),
        (1, t(&[a, a, b, b, c, c])),
    ];
    terms.iter().try_fold(0i128, |acc, (k, v)| acc.checked_add(v.and_then(|v| v.checked_mul(*k))?))
}

/// Exhaustive search for the monic totally real `A4` quartic of field
/// discriminant `ℓ²` whose cubic resolvent defines the cubic field of
/// conductor ℓ, over `x⁴ + a x³ + b x² + c x + d` with `a ∈ {0, ±1, −2}`
/// and `|b|, |c|, |d| ≤ bound`.
///
/// Among all hits the polynomial with the least height `max |coefficient|`
/// is returned, ties broken lexicographically on `(a, b, c, d)`.
pub fn quartic_field_search(ell: &Int, bound: i64) -> Result<NumberField> {
    check_conductor(ell)?;
    let l = cubic_subfield(ell)?;
    let h = crate::class::class_group(&l)?.class_number();
    if !h.is_multiple_of(&Int::from(4)) {
        return Err(Error::Verification(format!("h_L = {h} is not divisible by 4 for ℓ = {ell}")));
    }
    let ell_i = ell.to_i128().ok_or_else(|| Error::InvalidArgument("ℓ too large".into()))?;
    let l2 = ell_i * ell_i;
    let mut best: Option<((i64, [i64; 4]), NumberField)> = None;
    for a in [0i64, -1, 1, -2] {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    let key = (a.abs().max(b.abs()).max(c.abs()).max(d.abs()), [a, b, c, d]);
                    if best.as_ref().is_some_and(|(k, _)| key >= *k) {
                        continue;
                    }
                    let Some(disc) = quartic_disc_i128(a as i128, b as i128, c as i128, d as i128) else {
                        continue;
                    };
                    if disc <= 0 || disc % l2 != 0 || !is_square(&Int::from(disc / l2)) {
                        continue;
                    }
                    // a nonzero square discriminant prime to small primes is cheap to
                    // test; the exact field checks follow
                    let f = IntPoly::from_i64s(&[d, c, b, a, 1]);
                    if let Some(k) = verify_quartic(&f, ell, &l) {
                        best = Some((key, k));
                    }
                }
            }
        }
    }
    best.map(|(_, k)| k).ok_or_else(|| {
        Error::NotFound(format!(
            "no A4 quartic of discriminant {ell}² with coefficients in ±{bound}; supply quartic_poly in the configuration"
        ))
    })
}

/// Checks that `f` defines a totally real `A4` quartic of field
/// discriminant `ℓ²` whose resolvent field is `l`.
pub(crate) fn verify_quartic(f: &IntPoly, ell: &Int, l: &NumberField) -> Option<NumberField> {
    let k = NumberField::new(f).ok()?;
    if k.field_disc() != &(ell * ell) || quartic_galois_tag(f) != QuarticGaloisTag::A4 {
        return None;
    }
    let r = NumberField::new(&quartic_resolvent(f)).ok()?;
    (r.field_disc() == l.field_disc()).then_some(k)
}

fn primitive_root(p: u64) -> u64 {
    let mut fac = Vec::new();
    let mut m = p - 1;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            fac.push(q);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        fac.push(m);
    }
    (2..p).find(|&g| fac.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).unwrap()
}

/// Discrete logarithm table modulo a small prime.
fn index_table(p: u64) -> Vec<u64> {
    let g = primitive_root(p);
    let mut ind = vec![0u64; p as usize];
    let mut x = 1u64;
    for k in 0..p - 1 {
        ind[x as usize] = k;
        x = x * g % p;
    }
    ind
}

fn mul_cyclic(a: &[Int], b: &[Int]) -> Vec<Int> {
    let m = a.len();
    let mut out = vec![Int::zero(); m];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[(i + j) % m] += x * y;
            }
        }
    }
    out
}

fn cyclotomic(m: u64) -> IntPoly {
    // x^m − 1 divided by Φ_d for every proper divisor d
    let mut f = &IntPoly::monomial(Int::one(), m as usize) - &IntPoly::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            f = f.divrem_monic(&cyclotomic(d)).0;
        }
    }
    f
}

/// Rational value of an element of `Z[x]/(x^m − 1)` known to lie in `Q`
/// after reduction modulo `Φ_m`.
fn rational_value(v: &[Int], phi: &IntPoly) -> Result<Int> {
    let r = IntPoly::new(v.to_vec()).rem_monic(phi);
    match r.degree() {
        None => Ok(Int::zero()),
        Some(0) => Ok(r.coeff(0)),
        _ => Err(Error::Verification("period sum is not rational".into())),
    }
}

/// The two cyclic cubic fields of conductor `ℓ₁ℓ₂` (fixed fields of the
/// kernels of `χ₁χ₂` and `χ₁χ₂⁻¹`), as exact Gaussian period polynomials.
pub fn diagonal_cubics(l1: u64, l2: u64) -> Result<[NumberField; 2]> {
    for l in [l1, l2] {
        if !is_prime(l) || l % 3 != 1 {
            return Err(Error::InvalidArgument(format!("{l} is not a prime ≡ 1 mod 3")));
        }
    }
    if l1 == l2 {
        return Err(Error::InvalidArgument("conductor primes must be distinct".into()));
    }
    let m = l1 * l2;
    let (i1, i2) = (index_table(l1), index_table(l2));
    let phi = cyclotomic(m);
    let mut out = Vec::new();
    for s in [1u64, 2] {
        let mut eta = vec![vec![Int::zero(); m as usize]; 3];
        for a in 1..m {
            if a % l1 == 0 || a % l2 == 0 {
                continue;
            }
            let label = (i1[(a % l1) as usize] + s * i2[(a % l2) as usize]) % 3;
            eta[label as usize][a as usize] += 1;
        }
        let e1: Vec<Int> = (0..m as usize).map(|k| &eta[0][k] + &eta[1][k] + &eta[2][k]).collect();
        let p01 = mul_cyclic(&eta[0], &eta[1]);
        let p02 = mul_cyclic(&eta[0], &eta[2]);
        let p12 = mul_cyclic(&eta[1], &eta[2]);
        let e2: Vec<Int> = (0..m as usize).map(|k| &p01[k] + &p02[k] + &p12[k]).collect();
        let e3 = mul_cyclic(&p01, &eta[2]);
        let (s1, s2, s3) = (rational_value(&e1, &phi)?, rational_value(&e2, &phi)?, rational_value(&e3, &phi)?);
        let f = IntPoly::new(vec![-s3, s2, -s1, Int::one()]);
        let k = NumberField::new(&f)?;
        let want = Int::from(m) * Int::from(m);
        if k.field_disc() != &want {
            return Err(Error::Verification(format!("diagonal field {f} has disc {}", k.field_disc())));
        }
        out.push(k);
    }
    let [a, b]: [NumberField; 2] = out.try_into().unwrap();
    Ok([a, b])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shanks_parameters() {
        assert_eq!(shanks_param(&Int::from(163)), Some(Int::from(11)));
        assert_eq!(shanks_param(&Int::from(277)), None);
        assert_eq!(shanks_param(&Int::from(7)), Some(Int::from(-1)));
        assert_eq!(shanks_param(&Int::from(13)), Some(Int::from(1)));
    }

    #[test]
    fn both_cubic_constructions_agree() {
        for l in [7, 13, 19, 31, 37, 43, 61, 67, 79, 97, 103, 109, 127, 139, 151, 157, 163, 181, 193, 199] {
            let ell = Int::from(l);
            let k = cubic_subfield(&ell).unwrap();
            assert_eq!(k.field_disc(), &(&ell * &ell));
            let p = NumberField::new(&period_cubic(&ell).unwrap()).unwrap();
            assert_eq!(p.field_disc(), &(&ell * &ell), "period cubic at {l}");
        }
        assert!(cubic_subfield(&Int::from(11)).is_err());
    }

    #[test]
    fn diagonal_fields_of_conductor_91() {
        let [a, b] = diagonal_cubics(7, 13).unwrap();
        let mut polys = [a.poly().clone(), b.poly().clone()];
        polys.sort_by_key(|p| p.coeff(0));
        assert_eq!(polys[0], IntPoly::from_i64s(&[-27, -30, -1, 1]));
        assert_eq!(polys[1], IntPoly::from_i64s(&[64, -30, -1, 1]));
    }
}
