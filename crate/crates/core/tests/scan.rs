use levelraise_core::census::{diagonal_check, scan_conductors};
use levelraise_core::class::class_group;
use levelraise_core::field::cubic_subfield;
use levelraise_core::Int;

#[test]
fn scanner_up_to_607() {
    let entries = scan_conductors(607).unwrap();
    let passes = |ell: u64| entries.iter().find(|e| e.ell == ell).unwrap().passes;
    for ell in [163, 277, 349, 547, 607] {
        assert!(passes(ell), "ℓ = {ell}");
    }
    for ell in [7, 13, 19, 31, 37, 43, 61] {
        assert!(!passes(ell), "ℓ = {ell}");
    }
    let shanks = |ell: u64| entries.iter().find(|e| e.ell == ell).unwrap().shanks_param.is_some();
    assert!(shanks(163) && shanks(349));
    assert!(!shanks(277) && !shanks(547));
    for e in entries.iter().filter(|e| e.passes) {
        assert_eq!(e.two_rank % 2, 0);
    }
    assert!(scan_conductors(2001).is_err());
}

#[test]
fn two_rank_is_even_up_to_200() {
    let mut n = 0;
    for ell in (7..=200u64).filter(|&l| l % 3 == 1 && levelraise_core::arith::is_prime(l)) {
        let l = cubic_subfield(&Int::from(ell)).unwrap();
        assert_eq!(class_group(&l).unwrap().two_rank() % 2, 0, "ℓ = {ell}");
        n += 1;
    }
    assert_eq!(n, 21);
}

#[test]
fn ramified_prime_principal_for_163() {
    let l = cubic_subfield(&Int::from(163)).unwrap();
    let cg = class_group(&l).unwrap();
    assert_eq!(cg.class_number(), Int::from(4));
    assert_eq!(cg.two_rank(), 2);
    let p = &l.factor_rational_prime(&Int::from(163)).unwrap()[0];
    assert_eq!(p.e, 3);
    assert!(cg.is_principal(&l, &p.ideal).unwrap());
}

#[test]
fn diagonal_fields_have_small_two_rank() {
    for (a, b) in [(7, 13), (7, 19), (7, 31), (7, 37), (13, 19)] {
        let r = diagonal_check(a, b).unwrap();
        assert_eq!(r.fields.len(), 2);
        let d = (a * b * a * b).to_string();
        assert!(r.fields.iter().all(|f| f.disc == d && f.two_rank < 2));
        assert!(r.passes);
    }
}
