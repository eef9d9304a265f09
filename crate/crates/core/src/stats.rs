//! Density tables and the statistics run on census counts.
//!
//! Everything here is a pure function of integer counts, so results never
//! depend on how the census was scheduled. Ratios are rendered exactly from
//! the integers with round-half-even at the last digit shown.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::census::CensusRow;
use crate::error::{Error, Result};

/// Digits after the decimal point in rendered ratios.
pub const RATIO_DIGITS: u32 = 5;

/// Placeholder for a ratio whose denominator is zero.
pub const EMPTY_RATIO: &str = "—";

/// `num/den` as a fixed-point decimal with `digits` places, rounded half to even.
pub fn format_ratio(num: &BigUint, den: &BigUint, digits: u32) -> Option<String> {
    if den.is_zero() {
        return None;
    }
    let scale = BigUint::from(10u32).pow(digits);
    let (mut q, r) = (num * &scale).div_rem(den);
    let twice = r * 2u32;
    if twice > *den || (twice == *den && q.is_odd()) {
        q += 1u32;
    }
    let (int, frac) = q.div_rem(&scale);
    if digits == 0 {
        return Some(int.to_string());
    }
    Some(format!("{int}.{:0>width$}", frac.to_string(), width = digits as usize))
}

/// Integer with comma thousands separators, as in the density tables.
pub fn format_thousands(n: u64) -> String {
    let s = n.to_string();
    let mut out = String::with_capacity(s.len() + s.len() / 3);
    for (i, ch) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// The four ratio columns of a census row: `|CΛ|/|C3|`, `|Cτ̄|/|C3|`, their
/// product, and `|CΛ∩Cτ̄|/|C3|`. The product is recomputed from the counts.
pub fn row_ratios(row: &CensusRow) -> [Option<String>; 4] {
    let c3 = BigUint::from(row.c3);
    let c3sq = &c3 * &c3;
    let d = RATIO_DIGITS;
    [
        format_ratio(&BigUint::from(row.c_lambda), &c3, d),
        format_ratio(&BigUint::from(row.c_taubar), &c3, d),
        format_ratio(&(BigUint::from(row.c_lambda) * BigUint::from(row.c_taubar)), &c3sq, d),
        format_ratio(&BigUint::from(row.c_both), &c3, d),
    ]
}

/// `((2/3)|C3| − |CΛ|) / √|C3|`: the deviation used for the large tables,
/// which scales by `√|C3|` rather than the binomial standard deviation.
pub fn deviation_metric(c3: u64, c_lambda: u64) -> Result<f64> {
    if c3 == 0 {
        return Err(Error::Degenerate("deviation metric needs |C3| > 0".into()));
    }
    let c3f = c3 as f64;
    Ok((2.0 * c3f / 3.0 - c_lambda as f64) / c3f.sqrt())
}

/// One-sample binomial z-score of `count` successes in `n` trials against `p0`.
pub fn binomial_z(count: u64, n: u64, p0: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Degenerate("binomial z needs n > 0".into()));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidArgument(format!("p0 = {p0} outside (0, 1)")));
    }
    if count > n {
        return Err(Error::InvalidArgument(format!("count {count} exceeds n = {n}")));
    }
    let nf = n as f64;
    Ok((count as f64 - nf * p0) / (nf * p0 * (1.0 - p0)).sqrt())
}

/// Pearson chi-square for a 2×2 table (no continuity correction).
///
/// Cells are `n11` (in both), `n10` (first only), `n01`, `n00`.
pub fn independence_chi2(n11: u64, n10: u64, n01: u64, n00: u64) -> Result<f64> {
    let rows = [n11 + n10, n01 + n00];
    let cols = [n11 + n01, n10 + n00];
    if rows.contains(&0) || cols.contains(&0) {
        return Err(Error::Degenerate("2×2 table has an empty margin".into()));
    }
    // χ² = N (ad − bc)² / (row₁ row₂ col₁ col₂), exact in integers
    let n = BigUint::from(n11 + n10 + n01 + n00);
    let ad = BigUint::from(n11) * BigUint::from(n00);
    let bc = BigUint::from(n10) * BigUint::from(n01);
    let diff = if ad >= bc { ad - bc } else { bc - ad };
    let num = n * &diff * &diff;
    let den = rows.iter().chain(&cols).fold(BigUint::from(1u32), |acc, &m| acc * BigUint::from(m));
    let (q, r) = num.div_rem(&den);
    Ok(q.to_f64().unwrap() + r.to_f64().unwrap() / den.to_f64().unwrap())
}

/// Two-sided normal tail probability of a z-score.
pub fn normal_p_value(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    2.0 * (1.0 - n.cdf(z.abs()))
}

/// Upper tail probability of a chi-square statistic with `df` degrees of freedom.
pub fn chi2_p_value(x: f64, df: f64) -> f64 {
    1.0 - ChiSquared::new(df).unwrap().cdf(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub name: String,
    pub statistic: f64,
    /// Two-sided for z-scores, upper tail for chi-square; absent for the
    /// plain deviation metric.
    pub p_value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub rows: Vec<CensusRow>,
    pub tests: Vec<TestResult>,
}

/// Tests on the last row: the 2/3, 1/3 and 2/9 densities, independence of
/// the two conditions inside `C3`, and the 1/3 density of `C3` itself.
pub fn density_report(rows: &[CensusRow]) -> Result<DensityReport> {
    let last = rows.last().ok_or_else(|| Error::Degenerate("no census rows".into()))?;
    let mut tests = Vec::new();
    let mut z = |name: &str, k: u64, n: u64, p: f64| -> Result<()> {
        let s = binomial_z(k, n, p)?;
        tests.push(TestResult { name: name.into(), statistic: s, p_value: Some(normal_p_value(s)) });
        Ok(())
    };
    // the prime count is not in the CSV schema, so rows read back lack it
    if last.primes > 0 {
        z("z(C3 / primes vs 1/3)", last.c3, last.primes, 1.0 / 3.0)?;
    }
    z("z(CΛ / C3 vs 2/3)", last.c_lambda, last.c3, 2.0 / 3.0)?;
    z("z(Cτ̄ / C3 vs 1/3)", last.c_taubar, last.c3, 1.0 / 3.0)?;
    z("z(CΛ∩Cτ̄ / C3 vs 2/9)", last.c_both, last.c3, 2.0 / 9.0)?;
    tests.push(TestResult {
        name: "deviation ((2/3)|C3| - |CΛ|)/sqrt|C3|".into(),
        statistic: deviation_metric(last.c3, last.c_lambda)?,
        p_value: None,
    });
    let n11 = last.c_both;
    let n10 = last.c_lambda - n11;
    let n01 = last.c_taubar - n11;
    let n00 = last.c3 - last.c_lambda - n01;
    let chi = independence_chi2(n11, n10, n01, n00)?;
    tests.push(TestResult { name: "chi2(CΛ independent of Cτ̄)".into(), statistic: chi, p_value: Some(chi2_p_value(chi, 1.0)) });
    Ok(DensityReport { rows: rows.to_vec(), tests })
}

/// Rows in the density table layout: `n & |C3| & r_Λ & r_τ̄ & r_Λ·r_τ̄ & r_both`.
pub fn render_table(rows: &[CensusRow]) -> String {
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|r| r.n);
    let mut out = String::new();
    for r in &sorted {
        let mut cells = vec![format_thousands(r.n), r.c3.to_string()];
        cells.extend(row_ratios(r).into_iter().map(|x| x.unwrap_or_else(|| EMPTY_RATIO.to_string())));
        out.push_str(&cells.join(" & "));
        out.push('\n');
    }
    out
}

/// Column names shared by the CSV writer and readers.
pub const CSV_HEADER: &str = "n,c3,c_lambda,c_taubar,c_both,r_lambda,r_taubar,r_product,r_both";

pub fn render_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let ratios = row_ratios(r).map(|x| x.unwrap_or_default());
        out.push_str(&format!("{},{},{},{},{},{}\n", r.n, r.c3, r.c_lambda, r.c_taubar, r.c_both, ratios.join(",")));
    }
    out
}

/// Parses CSV written by [`render_csv`], checking the ratio columns against
/// the counts. The prime count is not part of the schema and is left at 0.
pub fn parse_csv(text: &str) -> Result<Vec<CensusRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::Config(format!("unexpected CSV header {other:?}"))),
    }
    let mut rows = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 9 {
            return Err(Error::Config(format!("expected 9 fields in {line:?}")));
        }
        let int = |s: &str| s.parse::<u64>().map_err(|e| Error::Config(format!("{s:?}: {e}")));
        let row = CensusRow { n: int(f[0])?, c3: int(f[1])?, c_lambda: int(f[2])?, c_taubar: int(f[3])?, c_both: int(f[4])?, primes: 0 };
        let expect = row_ratios(&row).map(|x| x.unwrap_or_default());
        if expect.iter().zip(&f[5..]).any(|(a, b)| a != b) {
            return Err(Error::Config(format!("ratio columns disagree with counts in {line:?}")));
        }
        rows.push(row);
    }
    Ok(rows)
}
