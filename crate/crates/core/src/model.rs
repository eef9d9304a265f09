//! Dimension bookkeeping for the deformation problem and the two
//! probabilistic models behind the expected densities.
//!
//! Random streams come from ChaCha8 (`rand_chacha`). Trials are cut into
//! fixed chunks of [`CHUNK`]; chunk `i` draws from the generator seeded with
//! the user seed and switched to stream `i`. A run is therefore reproducible
//! from `(seed, trials)` alone, whatever the number of workers.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::is_prime;
use crate::census::CensusRow;
use crate::error::{Error, Result};
use crate::stats::binomial_z;

/// Trials per independently seeded chunk.
pub const CHUNK: u64 = 1 << 16;

/// `dim 𝒩_v` and `dim H⁰(G_v, Ad⁰)` at one place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalDatum {
    pub label: String,
    pub dim_n: i64,
    pub dim_h0: i64,
}

impl LocalDatum {
    pub fn new(label: impl Into<String>, dim_n: i64, dim_h0: i64) -> Result<Self> {
        if dim_n < 0 || dim_h0 < 0 {
            return Err(Error::InvalidArgument("local dimensions must be nonnegative".into()));
        }
        Ok(LocalDatum { label: label.into(), dim_n, dim_h0 })
    }

    pub fn contribution(&self) -> i64 {
        self.dim_n - self.dim_h0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaceKind {
    At3,
    AtInfinity,
    AtEll,
    /// Auxiliary prime in `C3`.
    AuxC3,
    /// Nice auxiliary prime for a residue characteristic `p ≥ 5`.
    Nice(u64),
}

impl FromStr for PlaceKind {
    type Err = Error;

    /// Accepts `at3`, `atinf` (or `at∞`), `atell`, `auxc3` and `nice(p)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "at3" => Ok(PlaceKind::At3),
            "atinf" | "at∞" | "atinfinity" => Ok(PlaceKind::AtInfinity),
            "atell" | "atℓ" => Ok(PlaceKind::AtEll),
            "auxc3" => Ok(PlaceKind::AuxC3),
            _ => {
                let p = t
                    .strip_prefix("nice(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.trim().parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown place kind {s:?}")))?;
                if p < 5 || !is_prime(p) {
                    return Err(Error::InvalidArgument(format!("nice primes need a prime p ≥ 5, got {p}")));
                }
                Ok(PlaceKind::Nice(p))
            }
        }
    }
}

impl fmt::Display for PlaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceKind::At3 => write!(f, "3"),
            PlaceKind::AtInfinity => write!(f, "∞"),
            PlaceKind::AtEll => write!(f, "ℓ"),
            PlaceKind::AuxC3 => write!(f, "v"),
            PlaceKind::Nice(p) => write!(f, "v (p = {p})"),
        }
    }
}

pub fn local_dims(kind: PlaceKind) -> LocalDatum {
    let (n, h0) = match kind {
        PlaceKind::At3 => (4, 1),
        PlaceKind::AtInfinity => (0, 3),
        PlaceKind::AtEll | PlaceKind::AuxC3 | PlaceKind::Nice(_) => (1, 1),
    };
    LocalDatum { label: kind.to_string(), dim_n: n, dim_h0: h0 }
}

/// Preset local dimensions by name; see [`PlaceKind::from_str`].
pub fn local_dims_preset(kind: &str) -> Result<LocalDatum> {
    Ok(local_dims(kind.parse()?))
}

/// `dim H⁰ − dim H⁰(dual) + Σ (dim 𝒩_v − dim H⁰(G_v))`: zero means the
/// Selmer and dual Selmer groups have the same dimension.
pub fn wiles_difference(h0: i64, h0_dual: i64, locals: &[LocalDatum]) -> i64 {
    h0 - h0_dual + locals.iter().map(LocalDatum::contribution).sum::<i64>()
}

/// The base set `{3, ∞, ℓ}`.
pub fn base_locals() -> Vec<LocalDatum> {
    [PlaceKind::At3, PlaceKind::AtInfinity, PlaceKind::AtEll].into_iter().map(local_dims).collect()
}

/// `|P¹(F_p)| = (p² − 1)/(p − 1)`.
pub fn projective_line_size(p: u64) -> u64 {
    (p * p - 1) / (p - 1)
}

/// The `p` lines of `F_p²` other than `(0:1)`, written `(1:b)`; `b = 0` is
/// the line `(1:0)` fixed by the unramified condition.
#[derive(Clone, Copy, Debug)]
pub struct LineModel {
    p: u64,
}

impl LineModel {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidArgument(format!("line model needs an odd prime, got {p}")));
        }
        Ok(LineModel { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Every point of `P¹(F_p)` as a normalized pair.
    pub fn all_lines(&self) -> Vec<(u64, u64)> {
        let mut v: Vec<(u64, u64)> = (0..self.p).map(|b| (1, b)).collect();
        v.push((0, 1));
        v
    }

    pub fn ramified_lines(&self) -> Vec<(u64, u64)> {
        (0..self.p).map(|b| (1, b)).collect()
    }

    pub fn distinguished(&self) -> (u64, u64) {
        (1, 0)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> (u64, u64) {
        (1, rng.gen_range(0..self.p))
    }

    pub fn probability(&self) -> f64 {
        (self.p - 1) as f64 / self.p as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    /// Normal-approximation 95% interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    fn new(successes: u64, trials: u64) -> Self {
        let est = successes as f64 / trials as f64;
        let half = 1.96 * (est * (1.0 - est) / trials as f64).sqrt();
        Estimate { successes, trials, estimate: est, ci_low: (est - half).max(0.0), ci_high: (est + half).min(1.0) }
    }

    pub fn std_error(p: f64, trials: u64) -> f64 {
        (p * (1.0 - p) / trials as f64).sqrt()
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunked<T: Send>(trials: u64, workers: usize, f: impl Fn(u64, u64) -> T + Sync + Send) -> Result<Vec<T>> {
    let chunks: Vec<(u64, u64)> =
        (0..trials.div_ceil(CHUNK)).map(|i| (i, CHUNK.min(trials - i * CHUNK))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(|| chunks.par_iter().map(|&(i, n)| f(i, n)).collect()))
}

/// Frequency with which a uniformly random ramified line differs from `(1:0)`.
pub fn simulate_line_model(p: u64, trials: u64, seed: u64) -> Result<Estimate> {
    simulate_line_model_par(p, trials, seed, 1)
}

pub fn simulate_line_model_par(p: u64, trials: u64, seed: u64, workers: usize) -> Result<Estimate> {
    let model = LineModel::new(p)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let hits = chunked(trials, workers, |i, n| {
        let mut rng = chunk_rng(seed, i);
        (0..n).filter(|_| model.sample(&mut rng) != model.distinguished()).count() as u64
    })?;
    Ok(Estimate::new(hits.iter().sum(), trials))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelFrequency {
    pub level: u32,
    pub hits: u64,
    pub trials: u64,
    pub frequency: f64,
    /// `3⁻ⁿ`.
    pub expected: f64,
}

/// For each level `n`, the frequency of drawing `0` uniformly from `Z/3ⁿ`.
pub fn simulate_unramified_probability(n_levels: u32, trials: u64, seed: u64) -> Result<Vec<LevelFrequency>> {
    simulate_unramified_probability_par(n_levels, trials, seed, 1)
}

pub fn simulate_unramified_probability_par(
    n_levels: u32,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<LevelFrequency>> {
    if n_levels == 0 || n_levels > 30 {
        return Err(Error::InvalidArgument(format!("levels must lie in 1..=30, got {n_levels}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let parts = chunked(trials, workers, |i, n| {
        let mut rng = chunk_rng(seed, i);
        let mut hits = vec![0u64; n_levels as usize];
        for _ in 0..n {
            for (k, h) in hits.iter_mut().enumerate() {
                if rng.gen_range(0..3u64.pow(k as u32 + 1)) == 0 {
                    *h += 1;
                }
            }
        }
        hits
    })?;
    Ok((0..n_levels)
        .map(|k| {
            let hits: u64 = parts.iter().map(|h| h[k as usize]).sum();
            LevelFrequency {
                level: k + 1,
                hits,
                trials,
                frequency: hits as f64 / trials as f64,
                expected: 3f64.powi(-(k as i32 + 1)),
            }
        })
        .collect())
}

/// z-score of `|CΛ|` against `(2/3)|C3|` on the last census row: only
/// membership in the distinguished line is visible in the census.
pub fn empirical_line_test(rows: &[CensusRow]) -> Result<f64> {
    let last = rows.last().ok_or_else(|| Error::Degenerate("no census rows".into()))?;
    if last.c3 == 0 {
        return Err(Error::Degenerate("C3 is empty".into()));
    }
    binomial_z(last.c_lambda, last.c3, 2.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_balance() {
        assert_eq!(wiles_difference(0, 0, &base_locals()), 0);
        let mut l = base_locals();
        l.push(local_dims_preset("auxC3").unwrap());
        assert_eq!(wiles_difference(0, 0, &l), 0);
        assert_eq!(wiles_difference(2, 2, &[]), 0);
        assert_eq!(local_dims_preset("nice(7)").unwrap().dim_n, 1);
        assert!(local_dims_preset("at5").is_err());
        assert!(local_dims_preset("nice(9)").is_err());
    }

    #[test]
    fn line_counts() {
        for p in [3, 5, 7, 11, 13] {
            let m = LineModel::new(p).unwrap();
            assert_eq!(projective_line_size(p), p + 1);
            assert_eq!(m.all_lines().len() as u64, p + 1);
            assert_eq!(m.ramified_lines().len() as u64, p);
        }
    }

    #[test]
    fn simulation_is_partition_independent() {
        let a = simulate_line_model_par(5, 300_000, 42, 1).unwrap();
        let b = simulate_line_model_par(5, 300_000, 42, 4).unwrap();
        assert_eq!(a, b);
        let one = simulate_line_model(3, 1, 7).unwrap();
        assert!(one.successes <= 1);
        assert_eq!(one, simulate_line_model(3, 1, 7).unwrap());
        assert!(simulate_unramified_probability(3, 0, 1).is_err());
    }
}
