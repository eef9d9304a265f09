use levelraise_core::config::cache::FieldRecord;
use levelraise_core::config::{checkpoints_up_to, Config, IntLit};
use proptest::prelude::*;

fn golden(ell: u64) -> Config {
    Config::load(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../configs/ell{ell}.toml"))).unwrap()
}

#[test]
fn shipped_configs_parse() {
    for ell in [163, 277, 349] {
        let c = golden(ell);
        assert_eq!(c.ell, ell);
        assert_eq!(c.quartic().unwrap().unwrap().degree(), Some(4));
        assert_eq!(c.unit_coords().unwrap().unwrap().len(), 3);
        assert_eq!(c.effective_checkpoints(), vec![1000, 5000, 50_000, 100_000]);
    }
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(Config::from_toml("ell = 163\nworkers = 0\n").is_err());
    let mut c = Config::new(163);
    c.seed = u64::MAX;
    assert!(c.to_toml().is_err());
    assert!(Config::from_toml("ell = 163\nmax_v = 10\ncheckpoints = [5, 20]\n").is_err());
    assert!(Config::from_toml("ell = 163\ncheckpoints = [50, 20]\n").is_err());
    assert!(Config::from_toml("ell = 163\nquartic_poly = [1, 2]\n").is_err());
    assert!(Config::from_toml("ell = 163\ncolour = 3\n").is_err());
    assert!(Config::from_toml("ell = 163\ncubic_poly = [1, 0, \"-831\", \"x\"]\n").unwrap().cubic().is_err());
}

#[test]
fn default_checkpoints() {
    assert_eq!(checkpoints_up_to(1000), vec![1000]);
    assert_eq!(checkpoints_up_to(100_000), vec![1000, 5000, 50_000, 100_000]);
    assert_eq!(checkpoints_up_to(7000), vec![1000, 5000, 7000]);
}

#[test]
fn malformed_records_are_rejected() {
    assert!(FieldRecord::from_text("format = \"other\"\n").is_err());
}

proptest! {
    #[test]
    fn config_round_trips(ell in 7u64..10_000, max_v in 1000u64..1_000_000, seed in 0..=i64::MAX as u64, big in any::<bool>()) {
        let mut c = Config::new(ell);
        c.max_v = max_v;
        c.seed = seed;
        c.checkpoints = Some(checkpoints_up_to(max_v));
        let lit = if big { IntLit::Big("123456789012345678901234567890".into()) } else { IntLit::Small(-3) };
        c.cubic_poly = Some(vec![IntLit::Small(1), lit, IntLit::Small(0), IntLit::Small(5)]);
        c.external_flags.insert("condition3".into(), big);
        let back = Config::from_toml(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
