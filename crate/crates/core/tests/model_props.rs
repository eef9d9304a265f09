use levelraise_core::census::CensusRow;
use levelraise_core::model::{
    base_locals, empirical_line_test, local_dims, local_dims_preset, projective_line_size, simulate_line_model,
    simulate_line_model_par, simulate_unramified_probability, wiles_difference, LocalDatum, PlaceKind,
};
use proptest::prelude::*;

fn aux() -> impl Strategy<Value = LocalDatum> {
    prop_oneof![Just(local_dims(PlaceKind::AuxC3)), prop::sample::select(vec![5u64, 7, 11, 13]).prop_map(|p| local_dims(PlaceKind::Nice(p)))]
}

proptest! {
    #[test]
    fn appending_auxiliary_primes_keeps_balance(extra in proptest::collection::vec(aux(), 0..12)) {
        let mut l = base_locals();
        l.extend(extra);
        prop_assert_eq!(wiles_difference(0, 0, &l), 0);
    }

    #[test]
    fn wiles_difference_is_additive(
        a in proptest::collection::vec((0i64..5, 0i64..5), 0..6),
        b in proptest::collection::vec((0i64..5, 0i64..5), 0..6),
    ) {
        let mk = |v: &[(i64, i64)]| v.iter().map(|&(n, h)| LocalDatum::new("x", n, h).unwrap()).collect::<Vec<_>>();
        let (la, lb) = (mk(&a), mk(&b));
        let both: Vec<_> = la.iter().chain(&lb).cloned().collect();
        prop_assert_eq!(wiles_difference(0, 0, &both), wiles_difference(0, 0, &la) + wiles_difference(0, 0, &lb));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn line_model_estimate_within_five_sigma(seed in any::<u64>(), pi in 0usize..3) {
        let p = [3u64, 5, 7][pi];
        let t = 10_000;
        let e = simulate_line_model(p, t, seed).unwrap();
        let target = (p - 1) as f64 / p as f64;
        let sigma = ((p - 1) as f64 / (p * p) as f64 / t as f64).sqrt();
        prop_assert!((e.estimate - target).abs() < 5.0 * sigma);
    }
}

#[test]
fn line_identity() {
    for p in [3, 5, 7, 11, 13] {
        assert_eq!(projective_line_size(p), p + 1);
    }
}

#[test]
fn presets() {
    let d = |k: &str| {
        let x = local_dims_preset(k).unwrap();
        (x.dim_n, x.dim_h0)
    };
    assert_eq!(d("at3"), (4, 1));
    assert_eq!(d("atinf"), (0, 3));
    assert_eq!(d("atell"), (1, 1));
    assert_eq!(d("auxC3"), (1, 1));
    assert_eq!(d("nice(7)"), (1, 1));
    assert!(local_dims_preset("at7").is_err());
}

#[test]
fn simulations_reproduce_and_converge() {
    let a = simulate_line_model_par(3, 1_000_000, 9, 1).unwrap();
    let b = simulate_line_model_par(3, 1_000_000, 9, 6).unwrap();
    assert_eq!(a, b);
    assert!((a.estimate - 2.0 / 3.0).abs() < 0.002);
    let u = simulate_unramified_probability(3, 1_000_000, 5).unwrap();
    assert!((u[0].frequency - 1.0 / 3.0).abs() < 0.002);
    assert!((u[2].frequency - 1.0 / 27.0).abs() < 0.001);
    assert!(simulate_unramified_probability(0, 10, 5).is_err());
}

#[test]
fn empirical_line_test_cases() {
    let row = |c3: u64, l: u64| CensusRow { n: 0, c3, c_lambda: l, c_taubar: 0, c_both: 0, primes: 0 };
    let c3 = 1_920_314u64;
    let l = (c3 as f64 * 0.66622).round() as u64;
    assert!(empirical_line_test(&[row(c3, l)]).unwrap().abs() < 1.5);
    assert_eq!(empirical_line_test(&[row(300, 200)]).unwrap(), 0.0);
    assert!(empirical_line_test(&[row(300, 0)]).unwrap() < -10.0);
    assert!(empirical_line_test(&[row(0, 0)]).is_err());
    assert!(empirical_line_test(&[]).is_err());
}
