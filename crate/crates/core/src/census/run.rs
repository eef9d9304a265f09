//! Census driver: disjoint prime ranges, merged in order.

use rayon::prelude::*;
use serde::Serialize;

use super::{fast_classify, ConductorData, Outcome, PrimeClassification};
use crate::arith::PrimeIter;
use crate::error::{Error, Result};

/// Primes per work block.
const BLOCK: u64 = 50_000;

/// Cumulative counts up to a checkpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub n: u64,
    pub c3: u64,
    pub c_lambda: u64,
    pub c_taubar: u64,
    pub c_both: u64,
    /// Primes up to `n` that were classified (skipped ones excluded).
    pub primes: u64,
}

#[derive(Clone, Debug, Default)]
pub struct CensusOutput {
    pub rows: Vec<CensusRow>,
    pub skipped: Vec<u64>,
    /// Per-prime records, when requested.
    pub records: Vec<PrimeClassification>,
}

#[derive(Clone, Debug, Default)]
struct Block {
    counts: CensusRow,
    skipped: Vec<u64>,
    records: Vec<PrimeClassification>,
}

/// Classifies every prime up to the last checkpoint with `workers` threads.
/// The output does not depend on `workers`.
pub fn run_census(cd: &ConductorData, checkpoints: &[u64], workers: usize, keep_records: bool) -> Result<CensusOutput> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be nonempty and strictly ascending".into()));
    }
    // block boundaries include every checkpoint
    let mut ranges: Vec<(u64, u64, usize)> = Vec::new();
    let mut lo = 1;
    for (ci, &hi) in checkpoints.iter().enumerate() {
        while lo < hi {
            let top = (lo + BLOCK).min(hi);
            ranges.push((lo, top, ci));
            lo = top;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let blocks: Vec<Result<Block>> =
        pool.install(|| ranges.par_iter().map(|&(lo, hi, _)| classify_range(cd, lo, hi, keep_records)).collect());
    let mut out = CensusOutput::default();
    let mut acc = CensusRow::default();
    for (i, b) in blocks.into_iter().enumerate() {
        let b = b?;
        acc.c3 += b.counts.c3;
        acc.c_lambda += b.counts.c_lambda;
        acc.c_taubar += b.counts.c_taubar;
        acc.c_both += b.counts.c_both;
        acc.primes += b.counts.primes;
        out.skipped.extend(b.skipped);
        out.records.extend(b.records);
        let ci = ranges[i].2;
        if ranges.get(i + 1).is_none_or(|r| r.2 != ci) {
            out.rows.push(CensusRow { n: checkpoints[ci], ..acc });
        }
    }
    for &v in &out.skipped {
        log::info!("skipped v = {v} (divides 3·ℓ·index)");
    }
    Ok(out)
}

/// Primes in `(lo, hi]`.
fn classify_range(cd: &ConductorData, lo: u64, hi: u64, keep: bool) -> Result<Block> {
    let mut b = Block::default();
    for v in PrimeIter::new(lo + 1, hi) {
        match fast_classify(cd, v)? {
            Outcome::Skipped(v) => b.skipped.push(v),
            Outcome::Classified(c) => {
                b.counts.primes += 1;
                if c.in_c3 {
                    b.counts.c3 += 1;
                    let l = c.in_c_lambda == Some(true);
                    let t = c.in_c_taubar == Some(true);
                    b.counts.c_lambda += l as u64;
                    b.counts.c_taubar += t as u64;
                    b.counts.c_both += (l && t) as u64;
                }
                if keep {
                    b.records.push(c);
                }
            }
        }
    }
    Ok(b)
}
