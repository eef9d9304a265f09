#![allow(dead_code)]

use std::sync::OnceLock;

use levelraise_core::census::{load_conductor, ConductorData};
use levelraise_core::config::Config;

pub const CONDUCTORS: [u64; 3] = [163, 277, 349];

pub fn conductor(ell: u64) -> &'static ConductorData {
    static CELLS: [OnceLock<ConductorData>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = CONDUCTORS.iter().position(|&e| e == ell).expect("known conductor");
    CELLS[i].get_or_init(|| load_conductor(&Config::new(ell)).expect("conductor loads"))
}

/// Lines `v lam tau dim` from an independently computed classification.
pub fn fixture(ell: u64) -> Vec<(u64, bool, bool)> {
    let path = format!("{}/tests/data/classification_{ell}.txt", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let w: Vec<u64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            (w[0], w[1] == 1, w[2] == 1)
        })
        .collect()
}
