use levelraise_core::arith::modp::{factor_mod, factor_poly_mod_p, ModPoly};
use levelraise_core::arith::{cornacchia_4l, is_prime, primes_in_range};
use levelraise_core::{Int, IntPoly};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn trial_division(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Every monic polynomial of degree `d` over `F_p`.
fn monics(p: u64, d: usize) -> Vec<ModPoly> {
    let count = p.pow(d as u32);
    (0..count)
        .map(|mut k| {
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push(k % p);
                k /= p;
            }
            c.push(1);
            ModPoly::new(p, c)
        })
        .collect()
}

fn irreducible_by_search(g: &ModPoly) -> bool {
    let p = g.modulus();
    let d = g.degree().unwrap();
    (1..=d / 2).all(|k| monics(p, k).iter().all(|h| !g.rem(h).is_zero()))
}

#[test]
fn prime_ranges_are_inclusive() {
    let v: Vec<u64> = primes_in_range(10, 30).collect();
    assert_eq!(v, [11, 13, 17, 19, 23, 29]);
    assert_eq!(primes_in_range(2, 2).collect::<Vec<_>>(), [2]);
    assert_eq!(primes_in_range(7, 7).collect::<Vec<_>>(), [7]);
    assert_eq!(primes_in_range(24, 28).count(), 0);
    let v: Vec<u64> = primes_in_range(1_000_000, 1_000_100).collect();
    assert_eq!(v, [1_000_003, 1_000_033, 1_000_037, 1_000_039, 1_000_081, 1_000_099]);
    assert_eq!(primes_in_range(1, 100_000).count(), 9592);
}

#[test]
fn prime_iteration_matches_trial_division() {
    let fast: Vec<u64> = primes_in_range(0, 20_000).collect();
    let slow: Vec<u64> = (0..=20_000).filter(|&n| trial_division(n)).collect();
    assert_eq!(fast, slow);
}

#[test]
fn small_textbook_factorizations() {
    let f = factor_poly_mod_p(&IntPoly::from_i64s(&[1, 0, 1]), &Int::from(5)).unwrap();
    assert_eq!(f.degree_pattern(), [1, 1]);
    let f = factor_poly_mod_p(&IntPoly::from_i64s(&[1, 0, 0, 0, 1]), &Int::from(2)).unwrap();
    assert_eq!(f.factors, [(ModPoly::new(2, vec![1, 1]), 4)]);
    assert!(factor_poly_mod_p(&IntPoly::from_i64s(&[1, 1]), &Int::from(15)).is_err());
    assert!(factor_poly_mod_p(&IntPoly::from_i64s(&[5, 10]), &Int::from(5)).is_err());
}

#[test]
fn cornacchia_for_all_small_conductors() {
    let mut count = 0;
    for ell in primes_in_range(7, 10_000).filter(|l| l % 3 == 1) {
        let (a, b) = cornacchia_4l(&Int::from(ell)).unwrap();
        let (a, b) = (a.to_i64().unwrap(), b.to_i64().unwrap());
        assert_eq!(a * a + 27 * b * b, 4 * ell as i64, "ℓ = {ell}");
        assert!(b > 0);
        assert_eq!(a.rem_euclid(3), 1);
        count += 1;
    }
    assert_eq!(count, 611);
    for (ell, ab) in [(163, (25, 1)), (13, (-5, 1)), (7, (1, 1))] {
        let (a, b) = cornacchia_4l(&Int::from(ell)).unwrap();
        assert_eq!((a.to_i64().unwrap(), b.to_i64().unwrap()), ab);
    }
    assert!(cornacchia_4l(&Int::from(11)).is_err());
    assert!(cornacchia_4l(&Int::from(91)).is_err());
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn factorization_reconstructs_and_is_irreducible(
        p in small_prime(),
        coeffs in prop::collection::vec(-50i64..50, 1..7),
    ) {
        let mut c = coeffs;
        c.push(1);
        let f = IntPoly::new(c.iter().map(|&x| Int::from(x)).collect());
        let fact = factor_poly_mod_p(&f, &Int::from(p)).unwrap();
        prop_assert_eq!(fact.product(), ModPoly::from_int(&f, p));
        for (g, e) in &fact.factors {
            prop_assert!(*e >= 1);
            prop_assert_eq!(g.coeffs().last(), Some(&1));
            prop_assert!(irreducible_by_search(g), "{} reducible mod {}", g, p);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn factorization_reconstructs_at_large_primes(
        p in (1_000u64..1_000_000).prop_filter_map("prime", |n| is_prime(n).then_some(n)),
        coeffs in prop::collection::vec(0u64..1_000_000, 1..9),
    ) {
        let mut c = coeffs;
        c.push(1);
        let g = ModPoly::new(p, c);
        let fact = factor_mod(&g);
        prop_assert_eq!(fact.product(), g.monic());
        let degrees: usize = fact.degree_pattern().iter().sum();
        prop_assert_eq!(Some(degrees), g.degree());
    }

    #[test]
    fn discriminant_vanishes_exactly_on_repeated_factors(
        a in prop::collection::vec(-6i64..6, 1..4),
        b in prop::collection::vec(-6i64..6, 1..3),
        square in any::<bool>(),
    ) {
        let mut a = a;
        a.push(1);
        let mut b = b;
        b.push(1);
        let pa = IntPoly::from_i64s(&a);
        let pb = IntPoly::from_i64s(&b);
        let f = if square { &(&pb * &pb) * &pa } else { &pa * &pb };
        let disc = f.discriminant();
        let g = f.to_rational().gcd(&f.derivative().to_rational());
        prop_assert_eq!(disc.is_zero(), g.degree().unwrap_or(0) > 0);
        if square {
            prop_assert!(disc.is_zero());
        }
    }
}
