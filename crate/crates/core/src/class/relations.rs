//! Factor bases, smooth elements and reduced ideal bases.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};


use crate::arith::lll::lll_gram;
use crate::field::{Elt, IdealHNF, NumberField, PrimeIdeal};
use crate::Int;

/// A list of prime ideals indexed by their rational primes.
#[derive(Clone, Debug)]
pub struct FactorBase {
    pub primes: Vec<PrimeIdeal>,
    by_p: BTreeMap<Int, Vec<usize>>,
}

impl FactorBase {
    pub fn new(primes: Vec<PrimeIdeal>) -> Self {
        let mut by_p: BTreeMap<Int, Vec<usize>> = BTreeMap::new();
        for (i, q) in primes.iter().enumerate() {
            by_p.entry(q.p.clone()).or_default().push(i);
        }
        FactorBase { primes, by_p }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Whether every prime above `p` is in the base.
    pub fn covers(&self, k: &NumberField, p: &Int) -> bool {
        let Some(idx) = self.by_p.get(p) else {
            return false;
        };
        let total: u32 = idx.iter().map(|&i| self.primes[i].e * self.primes[i].f).sum();
        total as usize == k.degree()
    }

    /// Exponent vector of `(γ)` over the base, if `(γ)` factors completely.
    ///
    /// `norm` must be `N(γ)`.
    pub fn factor_element(&self, k: &NumberField, g: &Elt, norm: &Int) -> Option<Vec<i64>> {
        self.factor_cofactor(k, g, norm, None)
    }

    /// Exponent vector of `(γ)·𝔟⁻¹` for `γ ∈ 𝔟`, if that ideal is supported
    /// on the base.
    pub fn factor_cofactor(&self, k: &NumberField, g: &Elt, norm: &Int, b: Option<&IdealHNF>) -> Option<Vec<i64>> {
        let mut rest = norm.abs();
        if rest.is_zero() {
            return None;
        }
        if let Some(b) = b {
            let (q, r) = rest.div_rem(b.norm());
            if !r.is_zero() {
                return None;
            }
            rest = q;
        }
        let mut v = vec![0i64; self.primes.len()];
        for (p, idx) in &self.by_p {
            if rest.is_one() {
                break;
            }
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            if e == 0 {
                continue;
            }
            let mut acc = 0i64;
            for &i in idx {
                let q = &self.primes[i];
                let mut val = k.valuation(q, g) as i64;
                if let Some(b) = b {
                    val -= k.ideal_valuation(q, b) as i64;
                }
                v[i] = val;
                acc += val * q.f as i64;
            }
            if acc != e as i64 {
                return None;
            }
        }
        rest.is_one().then_some(v)
    }

    /// Exponent vector of an ideal over the base; `None` if the ideal is
    /// not supported on it.
    pub fn factor_ideal(&self, k: &NumberField, a: &IdealHNF) -> Option<Vec<i64>> {
        let mut rest = a.norm().clone();
        let mut v = vec![0i64; self.primes.len()];
        for (p, idx) in &self.by_p {
            if !rest.is_multiple_of(p) {
                continue;
            }
            for &i in idx {
                let q = &self.primes[i];
                let val = k.ideal_valuation(q, a);
                v[i] = val as i64;
                for _ in 0..val * q.f {
                    rest /= p;
                }
            }
        }
        rest.is_one().then_some(v)
    }
}

/// LLL-reduced Z-basis of an ideal with respect to the trace form.
pub fn reduced_basis(k: &NumberField, a: &IdealHNF) -> Vec<Elt> {
    let b = a.basis_matrix();
    let g = b.mul(k.trace_gram()).mul(&b.transpose());
    let (h, _) = lll_gram(&g);
    h.mul(&b).row_vecs()
}

/// Small integer combinations of a basis: all coefficient vectors with
/// entries in `[-r, r]`, first nonzero entry positive, ordered by sup norm.
pub fn small_combinations(basis: &[Elt], k: &NumberField, r: i64) -> Vec<Elt> {
    let n = basis.len();
    let mut out = Vec::new();
    for radius in 1..=r {
        let side = (2 * radius + 1) as usize;
        let total = side.pow(n as u32);
        for code in 0..total {
            let mut c = Vec::with_capacity(n);
            let mut t = code;
            for _ in 0..n {
                c.push((t % side) as i64 - radius);
                t /= side;
            }
            if c.iter().map(|x| x.abs()).max() != Some(radius) {
                continue;
            }
            if c.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                continue;
            }
            let mut g = k.zero();
            for (ci, b) in c.iter().zip(basis) {
                if *ci != 0 {
                    g = k.add(&g, &k.scale(b, &Int::from(*ci)));
                }
            }
            out.push(g);
        }
    }
    out
}

/// Whether the log-embedding vectors `logs` (one per unit) have full rank
/// `r`, judged by the Gram determinant against a relative threshold.
pub fn log_rank(logs: &[Vec<f64>]) -> usize {
    let mut rows: Vec<Vec<f64>> = logs.to_vec();
    let mut rank = 0;
    let cols = rows.first().map_or(0, |r| r.len());
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).max_by(|&a, &b| rows[a][c].abs().partial_cmp(&rows[b][c].abs()).unwrap())
        else {
            break;
        };
        if rows[piv][c].abs() < 1e-7 {
            continue;
        }
        rows.swap(rank, piv);
        for i in 0..rows.len() {
            if i != rank {
                let f = rows[i][c] / rows[rank][c];
                for j in 0..cols {
                    rows[i][j] -= f * rows[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `(log|σ_1(u)|, …, log|σ_{n-1}(u)|)`; the last embedding is dropped since
/// the full vector sums to zero for units.
pub fn log_vector(k: &NumberField, u: &Elt) -> Vec<f64> {
    let e = k.embed(u);
    e[..e.len() - 1].iter().map(|x| x.abs().ln()).collect()
}
