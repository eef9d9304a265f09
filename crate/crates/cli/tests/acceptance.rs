//! One test per acceptance criterion; the test names are the report lines.

use std::time::{Duration, Instant};

use levelraise_core::arith::PrimeIter;
use levelraise_core::census::{
    classify_prime, diagonal_check, fast_classify, load_conductor, run_census, scan_conductors, ConductorData,
    Outcome,
};
use levelraise_core::class::class_group;
use levelraise_core::config::Config;
use levelraise_core::field::cubic_subfield;
use levelraise_core::model::{
    base_locals, local_dims_preset, simulate_line_model, simulate_unramified_probability, wiles_difference,
};
use levelraise_core::ray::{ray_class_3_quotient, Modulus};
use levelraise_core::stats::render_table;
use levelraise_core::Int;

const ELLS: [u64; 3] = [163, 277, 349];

/// Reference rows of the three density tables.
fn reference_row(ell: u64, n: u64) -> &'static str {
    match (ell, n) {
        (163, 1_000) => "1,000 & 55 & 0.69091 & 0.27273 & 0.18843 & 0.16364",
        (277, 1_000) => "1,000 & 53 & 0.67925 & 0.33962 & 0.23069 & 0.26415",
        (349, 1_000) => "1,000 & 50 & 0.66000 & 0.32000 & 0.21120 & 0.20000",
        (163, 100_000) => "100,000 & 3169 & 0.67214 & 0.33197 & 0.22313 & 0.22121",
        (277, 100_000) => "100,000 & 3195 & 0.65728 & 0.33083 & 0.21745 & 0.21565",
        (349, 100_000) => "100,000 & 3174 & 0.66635 & 0.32672 & 0.21771 & 0.21834",
        (163, 1_000_000) => "1,000,000 & 26116 & 0.66959 & 0.33183 & 0.22219 & 0.22285",
        (277, 1_000_000) => "1,000,000 & 26191 & 0.66347 & 0.33386 & 0.22150 & 0.22183",
        (349, 1_000_000) => "1,000,000 & 26077 & 0.66373 & 0.33263 & 0.22078 & 0.22000",
        _ => unreachable!(),
    }
}

fn load(ell: u64) -> ConductorData {
    load_conductor(&Config::new(ell)).unwrap()
}

fn table_row(cd: &ConductorData, n: u64, workers: usize) -> (String, levelraise_core::census::CensusRow) {
    let rows = run_census(cd, &[n], workers, false).unwrap().rows;
    (render_table(&rows).trim().to_string(), rows[0])
}

#[test]
fn table_163_at_one_thousand() {
    let t = Instant::now();
    let cd = load(163);
    let (line, r) = table_row(&cd, 1000, 1);
    assert_eq!((r.c3, r.c_lambda, r.c_taubar, r.c_both), (55, 38, 15, 9));
    assert_eq!(line, reference_row(163, 1000));
    assert!(t.elapsed() < Duration::from_secs(10), "{:?}", t.elapsed());
}

#[test]
fn tables_277_349_at_one_thousand() {
    for (ell, want) in [(277, (53, 36, 18, 14)), (349, (50, 33, 16, 10))] {
        let t = Instant::now();
        let cd = load(ell);
        let (line, r) = table_row(&cd, 1000, 1);
        assert_eq!((r.c3, r.c_lambda, r.c_taubar, r.c_both), want);
        assert_eq!(line, reference_row(ell, 1000));
        assert!(t.elapsed() < Duration::from_secs(10));
    }
}

#[test]
fn tables_at_one_hundred_thousand() {
    for ell in ELLS {
        let cd = load(ell);
        for (workers, limit) in [(1, 600), (8, 120)] {
            let t = Instant::now();
            let (line, _) = table_row(&cd, 100_000, workers);
            assert_eq!(line, reference_row(ell, 100_000), "ℓ = {ell}, {workers} workers");
            assert!(t.elapsed() < Duration::from_secs(limit));
        }
    }
}

#[test]
#[ignore = "about 10 s per conductor; run with --include-ignored"]
fn tables_at_one_million_smoke() {
    for ell in ELLS {
        let (line, _) = table_row(&load(ell), 1_000_000, 8);
        assert_eq!(line, reference_row(ell, 1_000_000));
    }
}

#[test]
fn ray_class_quotient_has_dimension_one() {
    for ell in ELLS {
        let cd = load(ell);
        let m = Modulus::new(&cd.f, vec![(cd.labels.three1.clone(), 2), (cd.labels.ell2.clone(), 1)]).unwrap();
        let q = ray_class_3_quotient(&cd.f, &m, &cd.class_f, &cd.units_f).unwrap();
        assert_eq!(q.dimension(), 1, "ℓ = {ell}");
    }
}

#[test]
fn class_number_four_and_principal_ramified_prime() {
    for ell in ELLS {
        let l = cubic_subfield(&Int::from(ell)).unwrap();
        let cg = class_group(&l).unwrap();
        assert_eq!(cg.class_number(), Int::from(4));
        assert_eq!(cg.two_rank(), 2);
    }
    let l = cubic_subfield(&Int::from(163)).unwrap();
    let cg = class_group(&l).unwrap();
    let p = &l.factor_rational_prime(&Int::from(163)).unwrap()[0];
    assert!(cg.is_principal(&l, &p.ideal).unwrap());
}

#[test]
fn two_rank_even_up_to_200() {
    for ell in PrimeIter::new(7, 200).filter(|l| l % 3 == 1) {
        let cg = class_group(&cubic_subfield(&Int::from(ell)).unwrap()).unwrap();
        assert_eq!(cg.two_rank() % 2, 0, "ℓ = {ell}");
    }
}

#[test]
fn scanner_conditions_and_shanks_labels() {
    let s = scan_conductors(607).unwrap();
    let get = |ell: u64| s.iter().find(|e| e.ell == ell).unwrap();
    assert!([163, 277, 349, 547, 607].iter().all(|&l| get(l).passes));
    assert!([7, 13, 19, 31, 37, 43, 61].iter().all(|&l| !get(l).passes));
    assert!(get(163).shanks_param.is_some() && get(349).shanks_param.is_some());
    assert!(get(277).shanks_param.is_none() && get(547).shanks_param.is_none());
}

#[test]
fn diagonal_fields_two_rank_below_two() {
    for (a, b) in [(7, 13), (7, 19), (7, 31), (7, 37), (13, 19)] {
        let r = diagonal_check(a, b).unwrap();
        assert!(r.fields.len() == 2 && r.fields.iter().all(|f| f.two_rank < 2), "({a}, {b})");
    }
}

#[test]
fn chebotarev_density_within_four_sigma() {
    for ell in ELLS {
        let r = run_census(&load(ell), &[100_000], 8, false).unwrap().rows[0];
        let n = r.primes as f64;
        let sigma = (n * 2.0 / 9.0).sqrt();
        assert!((r.c3 as f64 - n / 3.0).abs() < 4.0 * sigma, "ℓ = {ell}");
    }
}

#[test]
fn probabilistic_model_and_dimension_count() {
    let t = 1_000_000;
    for (i, p) in [3u64, 5, 7].into_iter().enumerate() {
        let e = simulate_line_model(p, t, 100 + i as u64).unwrap();
        let target = (p - 1) as f64 / p as f64;
        let sigma = (target * (1.0 - target) / t as f64).sqrt();
        assert!((e.estimate - target).abs() < 3.0 * sigma, "p = {p}");
    }
    for f in simulate_unramified_probability(4, t, 7).unwrap() {
        let sigma = (f.expected * (1.0 - f.expected) / t as f64).sqrt();
        assert!((f.frequency - f.expected).abs() < 3.0 * sigma, "level {}", f.level);
    }
    let mut locals = base_locals();
    assert_eq!(wiles_difference(0, 0, &locals), 0);
    for k in 0..10 {
        locals.push(local_dims_preset(if k % 2 == 0 { "auxC3" } else { "nice(5)" }).unwrap());
        assert_eq!(wiles_difference(0, 0, &locals), 0);
    }
}

#[test]
fn fast_and_generic_paths_agree_to_ten_thousand() {
    let mut checked = 0;
    for ell in ELLS {
        let cd = load(ell);
        for v in PrimeIter::new(2, 10_000) {
            let g = classify_prime(&cd, v).unwrap();
            if let Outcome::Classified(c) = g {
                if c.in_c3 {
                    assert_eq!(fast_classify(&cd, v).unwrap(), g, "ℓ = {ell}, v = {v}");
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 398 + 400 + 418);
}
