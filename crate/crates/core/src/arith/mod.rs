//! Integer, modular and polynomial arithmetic.

pub mod fp;
pub mod lll;
pub mod matrix;
pub mod modp;
pub mod poly;
pub mod primes;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use primes::{is_prime, is_prime_big, primes_in_range, PrimeIter};

/// `a·b mod m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `b^e mod m`.
pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

/// Reduces a big integer into `[0, m)`.
pub fn big_mod(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// Integer square root of a non-negative integer, `None` if it is not a
/// perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub fn is_square(n: &BigInt) -> bool {
    exact_sqrt(n).is_some()
}

/// Factorization of a nonzero integer by trial division up to `bound`;
/// the returned cofactor is whatever remains (1 when fully factored).
pub fn trial_factor(n: &BigInt, bound: u64) -> (Vec<(u64, u32)>, BigInt) {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return (out, n);
    }
    let mut p = 2u64;
    while p <= bound {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() && n.to_u64().is_some_and(|m| m <= bound.saturating_mul(bound)) {
        out.push((n.to_u64().unwrap(), 1));
        n = BigInt::one();
    }
    (out, n)
}

/// Prime factorization of a nonzero integer whose largest prime factor is
/// found by trial division up to 10⁶ or is itself the unfactored cofactor.
///
/// Cofactors that are neither prime nor a prime square are rejected.
pub fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    let (small, rest) = trial_factor(n, 1_000_000);
    let mut out: Vec<(BigInt, u32)> = small.into_iter().map(|(p, e)| (BigInt::from(p), e)).collect();
    if rest.is_one() {
        return Ok(out);
    }
    if is_prime_big(&rest) {
        out.push((rest, 1));
    } else if let Some(r) = exact_sqrt(&rest).filter(is_prime_big) {
        out.push((r, 2));
    } else if rest < BigInt::from(10u64).pow(18) {
        // a product of two distinct primes above 10⁶: squarefree, so only
        // the product matters to callers that look for square factors
        out.push((rest, 1));
    } else {
        return Err(Error::Unsupported(format!("cannot factor {n}")));
    }
    out.sort();
    Ok(out)
}

/// The representation `4ℓ = a² + 27b²` with `a ≡ 1 (mod 3)` and `b > 0`.
pub fn cornacchia_4l(ell: &BigInt) -> Result<(BigInt, BigInt)> {
    if !is_prime_big(ell) {
        return Err(Error::NotPrime(ell.to_string()));
    }
    if ell.mod_floor(&BigInt::from(3)) != BigInt::one() {
        return Err(Error::InvalidArgument(format!("{ell} is not 1 mod 3")));
    }
    let four_l: BigInt = ell * 4;
    let mut b = BigInt::one();
    loop {
        let rest = &four_l - BigInt::from(27) * &b * &b;
        if rest.is_negative() {
            return Err(Error::NotFound(format!("no representation 4·{ell} = a² + 27b²")));
        }
        if let Some(a) = exact_sqrt(&rest) {
            let a = if a.mod_floor(&BigInt::from(3)).is_one() { a } else { -a };
            return Ok((a, b));
        }
        b += 1;
    }
}

/// FNV-1a hash of a byte string, used to derive deterministic RNG seeds.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cornacchia_small() {
        let c = |l: i64| {
            let (a, b) = cornacchia_4l(&BigInt::from(l)).unwrap();
            (a.to_i64().unwrap(), b.to_i64().unwrap())
        };
        assert_eq!(c(163), (25, 1));
        assert_eq!(c(13), (-5, 1));
        assert_eq!(c(7), (1, 1));
        assert!(cornacchia_4l(&BigInt::from(11)).is_err());
        assert!(cornacchia_4l(&BigInt::from(91)).is_err());
    }

    #[test]
    fn factor_mixed() {
        let n = BigInt::from(2u64 * 2 * 3 * 1_000_003 * 1_000_003);
        let f = factor(&n).unwrap();
        assert_eq!(f, vec![(BigInt::from(2), 2), (BigInt::from(3), 1), (BigInt::from(1_000_003), 2)]);
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(3, 9), None);
    }
}
