//! Prime iteration and deterministic primality.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{mul_mod, pow_mod};

const SEGMENT: u64 = 1_000_000;

/// Miller–Rabin with the first twelve primes as witnesses; deterministic
/// for every `n < 3.3·10²⁴`.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primality of an arbitrary integer; deterministic below 3.3·10²⁴ and a
/// strong probable-prime test beyond.
pub fn is_prime_big(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(m) = n.to_u64() {
        return is_prime(m);
    }
    let n = n.magnitude();
    for &p in &WITNESSES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap();
    let d = &nm1 >> s;
    'outer: for &a in &WITNESSES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn small_primes_upto(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

/// Ascending iterator over the primes of `[lo, hi]`, sieving one segment of
/// 10⁶ integers at a time.
pub struct PrimeIter {
    base: Vec<u64>,
    seg_lo: u64,
    hi: u64,
    buf: Vec<u64>,
    pos: usize,
}

impl PrimeIter {
    pub fn new(lo: u64, hi: u64) -> Self {
        let root = (hi as f64).sqrt() as u64 + 2;
        PrimeIter { base: small_primes_upto(root), seg_lo: lo.max(2), hi, buf: Vec::new(), pos: 0 }
    }

    fn fill(&mut self) -> bool {
        self.buf.clear();
        self.pos = 0;
        while self.buf.is_empty() {
            if self.seg_lo > self.hi {
                return false;
            }
            let lo = self.seg_lo;
            let hi = self.hi.min(lo.saturating_add(SEGMENT - 1));
            let mut mark = vec![true; (hi - lo + 1) as usize];
            for &p in &self.base {
                if p * p > hi {
                    break;
                }
                let start = (p * p).max(lo.div_ceil(p) * p);
                let mut j = start;
                while j <= hi {
                    mark[(j - lo) as usize] = false;
                    j += p;
                }
            }
            self.buf.extend(mark.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| lo + i as u64));
            self.seg_lo = hi + 1;
            if hi == u64::MAX {
                self.hi = 0;
                self.seg_lo = 1;
            }
        }
        true
    }
}

impl Iterator for PrimeIter {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buf.len() && !self.fill() {
            return None;
        }
        self.pos += 1;
        Some(self.buf[self.pos - 1])
    }
}

/// The primes in `[lo, hi]`, ascending.
pub fn primes_in_range(lo: u64, hi: u64) -> PrimeIter {
    PrimeIter::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranges() {
        assert_eq!(primes_in_range(1, 10).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert_eq!(primes_in_range(5, 5).collect::<Vec<_>>(), vec![5]);
        assert_eq!(primes_in_range(0, 1).count(), 0);
        assert_eq!(primes_in_range(1, 2_000_000).count(), 148_933);
    }

    #[test]
    fn miller_rabin_edges() {
        assert!(is_prime(2) && is_prime(37) && is_prime(1_000_003));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime(1) && !is_prime(0));
        let big: BigInt = "170141183460469231731687303715884105727".parse().unwrap();
        assert!(is_prime_big(&big));
        assert!(!is_prime_big(&(&big * 3)));
    }
}
