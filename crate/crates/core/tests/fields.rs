mod common;

use levelraise_core::arith::modp::{factor_poly_mod_p, ModPoly};
use levelraise_core::arith::primes_in_range;
use levelraise_core::class::{two_rank, unit_group};
use levelraise_core::field::{
    cubic_subfield, quartic_galois_tag, quartic_resolvent, IdealHNF, NumberField, QuarticGaloisTag,
};
use levelraise_core::{Error, Int, IntPoly};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use common::{conductor, CONDUCTORS};

fn assert_decomposition(k: &NumberField, p: u64) {
    let pi = Int::from(p);
    let primes = k.factor_rational_prime(&pi).unwrap();
    let ef: u32 = primes.iter().map(|q| q.e * q.f).sum();
    assert_eq!(ef as usize, k.degree(), "Σef at {p}");
    let mut prod = k.unit_ideal();
    for q in &primes {
        assert!(k.ideal_contains(&q.ideal, &k.from_int(&pi)));
        prod = k.ideal_mul(&prod, &k.prime_power(q, q.e).unwrap()).unwrap();
    }
    assert_eq!(prod, k.principal_ideal(&k.from_int(&pi)), "∏𝔭^e at {p}");
}

#[test]
fn rational_primes_decompose_completely() {
    for ell in CONDUCTORS {
        let cd = conductor(ell);
        for p in primes_in_range(2, 200).chain([ell]) {
            assert_decomposition(&cd.l, p);
            assert_decomposition(&cd.f, p);
        }
    }
}

#[test]
fn cyclic_cubic_discriminant_is_conductor_squared() {
    let mut n = 0;
    for ell in primes_in_range(7, 1000).filter(|l| l % 3 == 1) {
        let l = cubic_subfield(&Int::from(ell)).unwrap();
        assert_eq!(l.field_disc(), &Int::from(ell * ell), "ℓ = {ell}");
        n += 1;
    }
    assert_eq!(n, 80);
}

#[test]
fn example_fields() {
    let k = NumberField::new(&IntPoly::from_i64s(&[-1, -4, -1, 1])).unwrap();
    assert_eq!(k.field_disc(), &Int::from(169));
    assert!(k.index().is_one());
    assert!(matches!(NumberField::new(&IntPoly::from_i64s(&[-5, 0, 1])), Err(Error::DegreeOutOfRange(2))));
    // x³ - 489x - 4075 has index 3 and field discriminant 163²
    let k = NumberField::new(&IntPoly::from_i64s(&[-4075, -489, 0, 1])).unwrap();
    assert_eq!(k.field_disc(), &Int::from(163 * 163));
    assert_eq!(k.poly_disc(), &(Int::from(163 * 163) * Int::from(k.index() * k.index())));
}

#[test]
fn residue_degrees_follow_tetrahedral_cycle_types() {
    for ell in CONDUCTORS {
        let cd = conductor(ell);
        let disc = cd.f.poly_disc();
        let mut counts = [0usize; 3];
        for p in primes_in_range(5, 20_000) {
            let pi = Int::from(p);
            if disc.is_multiple_of(&pi) {
                continue;
            }
            let pattern = factor_poly_mod_p(cd.f.poly(), &pi).unwrap().degree_pattern();
            let i = match pattern.as_slice() {
                [1, 1, 1, 1] => 0,
                [1, 3] => 1,
                [2, 2] => 2,
                other => panic!("cycle type {other:?} at {p} is not in A4"),
            };
            counts[i] += 1;
            if p < 2_000 {
                let mut fs: Vec<usize> =
                    cd.f.factor_rational_prime(&pi).unwrap().iter().map(|q| q.f as usize).collect();
                fs.sort_unstable();
                assert_eq!(fs, pattern);
            }
        }
        let total: usize = counts.iter().sum();
        for (c, dens) in counts.iter().zip([1.0 / 12.0, 8.0 / 12.0, 3.0 / 12.0]) {
            let sd = (total as f64 * dens * (1.0 - dens)).sqrt();
            assert!((*c as f64 - total as f64 * dens).abs() < 5.0 * sd, "ℓ = {ell}: {counts:?}");
        }
    }
}

#[test]
fn galois_tags() {
    let tag = |c: &[i64]| quartic_galois_tag(&IntPoly::from_i64s(c));
    assert_ne!(tag(&[1, 0, 0, 0, 1]), QuarticGaloisTag::A4);
    assert_eq!(tag(&[-1, -1, 0, 0, 1]), QuarticGaloisTag::S4);
    for ell in CONDUCTORS {
        assert_eq!(quartic_galois_tag(conductor(ell).f.poly()), QuarticGaloisTag::A4);
    }
}

#[test]
fn cubic_resolvent_splits_like_the_cubic_field() {
    for ell in CONDUCTORS {
        let cd = conductor(ell);
        let r = quartic_resolvent(cd.f.poly());
        let rdisc = r.discriminant();
        let mut checked = 0;
        for p in primes_in_range(5, 1000) {
            let pi = Int::from(p);
            if rdisc.is_multiple_of(&pi) || cd.l.poly_disc().is_multiple_of(&pi) {
                continue;
            }
            let roots = ModPoly::from_int(&r, p).roots().len();
            let split = cd.l.factor_rational_prime(&pi).unwrap().len();
            assert_eq!(roots, if split == 3 { 3 } else { 0 }, "ℓ = {ell}, p = {p}");
            checked += 1;
        }
        assert!(checked >= 30);
    }
}

#[test]
fn units_have_norm_plus_or_minus_one() {
    for ell in CONDUCTORS {
        let cd = conductor(ell);
        assert_eq!(cd.units_f.units.len(), 3);
        for u in &cd.units_f.units {
            assert_eq!(cd.f.norm(u).abs(), Int::one());
        }
    }
    let l13 = cubic_subfield(&Int::from(13)).unwrap();
    let u = unit_group(&l13).unwrap();
    assert_eq!(u.units.len(), 2);
    for e in &u.units {
        assert_eq!(l13.norm(e).abs(), Int::one());
    }
}

#[test]
fn ideal_operations_respect_fields() {
    let cd = conductor(163);
    let (l, f) = (&cd.l, &cd.f);
    let three1 = &cd.labels.three1;
    assert_eq!(three1.f, 3);
    let sq = f.ideal_pow(&three1.ideal, 2).unwrap();
    assert_eq!(sq.norm(), &Int::from(729));
    let unit = f.unit_ideal();
    assert!(unit.is_unit());
    assert_eq!(f.ideal_mul(&unit, &sq).unwrap(), sq);
    assert!(matches!(l.ideal_mul(&l.unit_ideal(), &sq), Err(Error::MixedFields)));
}

#[test]
fn two_rank_counts_even_divisors() {
    assert_eq!(two_rank(&[Int::from(6), Int::from(2)]), 2);
    assert_eq!(two_rank(&[Int::from(3), Int::from(9)]), 0);
    assert_eq!(two_rank(&[]), 0);
}

fn element(k: &NumberField, c: &[i64]) -> Vec<Int> {
    c.iter().take(k.degree()).map(|&x| Int::from(x)).collect()
}

fn product_ideal(k: &NumberField, factors: &[(usize, u32)], primes: &[IdealHNF]) -> IdealHNF {
    factors.iter().fold(k.unit_ideal(), |acc, &(i, e)| {
        k.ideal_mul(&acc, &k.ideal_pow(&primes[i], e).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ideal_norm_is_multiplicative(
        a in prop::collection::vec(-20i64..20, 4),
        b in prop::collection::vec(-20i64..20, 4),
        ell in prop::sample::select(CONDUCTORS.to_vec()),
        cubic in any::<bool>(),
    ) {
        let cd = conductor(ell);
        let k = if cubic { &cd.l } else { &cd.f };
        let (a, b) = (element(k, &a), element(k, &b));
        prop_assume!(!k.is_zero(&a) && !k.is_zero(&b));
        let ia = k.principal_ideal(&a);
        let ib = k.principal_ideal(&b);
        prop_assert_eq!(ia.norm(), &k.norm(&a).abs());
        let iab = k.ideal_mul(&ia, &ib).unwrap();
        prop_assert_eq!(iab.norm(), &(ia.norm() * ib.norm()));
        prop_assert_eq!(iab, k.principal_ideal(&k.mul(&a, &b)));
    }

    #[test]
    fn class_map_is_a_homomorphism(
        exps in prop::collection::vec((0usize..64, 1u32..3), 1..4),
        gen in prop::collection::vec(-6i64..6, 4),
    ) {
        let cd = conductor(163);
        let (k, cg) = (&cd.f, &cd.class_f);
        let small = &cg.small_primes().primes;
        let ideals: Vec<IdealHNF> = small.iter().map(|p| p.ideal.clone()).collect();
        let factors: Vec<(usize, u32)> = exps.iter().map(|&(i, e)| (i % small.len(), e)).collect();
        let a = product_ideal(k, &factors, &ideals);
        let mut expect = vec![Int::zero(); cg.divisors().len()];
        for &(i, e) in &factors {
            for (j, c) in cg.small_prime_coordinates(i).iter().enumerate() {
                expect[j] = (&expect[j] + c * Int::from(e)).mod_floor(&cg.divisors()[j]);
            }
        }
        prop_assert_eq!(cg.ideal_class_coordinates(k, &a).unwrap(), expect.clone());
        // multiplying by a principal ideal leaves the class unchanged
        let g = element(k, &gen);
        prop_assume!(!k.is_zero(&g));
        let ag = k.ideal_mul(&a, &k.principal_ideal(&g)).unwrap();
        prop_assert_eq!(cg.ideal_class_coordinates(k, &ag).unwrap(), expect);
    }
}
