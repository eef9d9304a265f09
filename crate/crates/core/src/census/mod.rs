//! Classification of auxiliary primes for a conductor ℓ, the conductor
//! scanner and the diagonal-field check.
//!
//! For a prime `v ≡ 1 mod 3` whose Frobenius in the tetrahedral quartic `F`
//! has order 3, `vO_F = 𝔳₁𝔳₂` with `N𝔳₁ = v³`. Membership in the two
//! subsets is read off the Artin image of `𝔳₁` in the 3-elementary ray class
//! quotients for the moduli `3₁²·ℓ₂` and `3₁²·𝔳₂`.

mod fast;
mod run;

use std::collections::BTreeMap;
use std::path::Path;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::is_prime;
use crate::class::{class_group, log_rank, log_vector, two_rank, unit_group, ClassGroupData, UnitData};
use crate::config::cache::{FieldData, FieldRecord, Splitting, FORMAT, VERSION};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::field::{
    cubic_subfield, diagonal_cubics, quartic_field_search, quartic_galois_tag, quartic_resolvent, shanks_param,
    NumberField, PrimeIdeal, QuarticGaloisTag,
};
use crate::ray::{artin_vector, exponent_stability, ray_class_3_quotient_with, tame_ramified, Modulus, RayClass3Quotient, SUnitData};
use crate::{Int, IntPoly};

pub use fast::FastData;
pub use run::{run_census, CensusOutput, CensusRow};

/// The primes `3₁, 3₂` over 3 and `ℓ₁, ℓ₂` over ℓ in `F`.
#[derive(Clone, Debug)]
pub struct SplittingLabels {
    /// Residue degree 3.
    pub three1: PrimeIdeal,
    /// Residue degree 1.
    pub three2: PrimeIdeal,
    /// Unramified.
    pub ell1: PrimeIdeal,
    /// Ramification index 3.
    pub ell2: PrimeIdeal,
}

/// Everything needed to classify primes for one conductor.
#[derive(Clone, Debug)]
pub struct ConductorData {
    pub ell: u64,
    pub l: NumberField,
    pub f: NumberField,
    pub class_l: ClassGroupData,
    pub class_f: ClassGroupData,
    pub units_f: UnitData,
    pub labels: SplittingLabels,
    pub shanks: Option<Int>,
    pub external_flags: BTreeMap<String, bool>,
    sunits: SUnitData,
    tau: RayClass3Quotient,
    fast: FastData,
    excluded: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeClassification {
    pub v: u64,
    pub in_c3: bool,
    /// Defined only for primes in `C3`.
    pub in_c_lambda: Option<bool>,
    pub in_c_taubar: Option<bool>,
}

impl PrimeClassification {
    fn outside(v: u64) -> Self {
        PrimeClassification { v, in_c3: false, in_c_lambda: None, in_c_taubar: None }
    }

    fn inside(v: u64, lambda: bool, taubar: bool) -> Self {
        PrimeClassification { v, in_c3: true, in_c_lambda: Some(lambda), in_c_taubar: Some(taubar) }
    }
}

/// Result of classifying one prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Classified(PrimeClassification),
    /// `v` divides `3ℓ·[O_F : Z[θ]]`.
    Skipped(u64),
}

impl ConductorData {
    pub fn is_shanks(&self) -> bool {
        self.shanks.is_some()
    }

    /// The fixed quotient for `3₁²·ℓ₂`.
    pub fn tau_quotient(&self) -> &RayClass3Quotient {
        &self.tau
    }

    /// Rational primes excluded from the census.
    pub fn excluded_primes(&self) -> &[u64] {
        &self.excluded
    }

    /// Versioned record of the fields for the cache.
    pub fn field_record(&self) -> FieldRecord {
        let split = |p: &Int, ps: [&PrimeIdeal; 2]| Splitting {
            p: p.to_string(),
            primes: ps.map(|q| [q.e, q.f]).to_vec(),
        };
        let lab = &self.labels;
        FieldRecord {
            format: FORMAT.into(),
            version: VERSION,
            ell: self.ell.to_string(),
            cubic: FieldData::from_field(&self.l, self.class_l.divisors(), &[]),
            quartic: FieldData::from_field(&self.f, self.class_f.divisors(), &self.units_f.units),
            splitting: vec![
                split(&Int::from(3), [&lab.three1, &lab.three2]),
                split(&Int::from(self.ell), [&lab.ell1, &lab.ell2]),
            ],
        }
    }
}

/// Checks that `f` defines a tetrahedral quartic field of discriminant ℓ²
/// whose cubic resolvent field has discriminant ℓ².
pub fn verify_quartic_field(f: &IntPoly, ell: &Int) -> Result<NumberField> {
    let k = NumberField::new(f)?;
    if k.degree() != 4 {
        return Err(Error::DegreeOutOfRange(k.degree()));
    }
    let want = ell * ell;
    if k.field_disc() != &want {
        return Err(Error::WrongDiscriminant {
            field: "F".into(),
            expected: want.to_string(),
            found: k.field_disc().to_string(),
        });
    }
    if quartic_galois_tag(f) != QuarticGaloisTag::A4 {
        return Err(Error::Verification("quartic is not tetrahedral".into()));
    }
    let r = NumberField::new(&quartic_resolvent(f))?;
    if r.field_disc() != &want {
        return Err(Error::WrongDiscriminant {
            field: "cubic resolvent of F".into(),
            expected: want.to_string(),
            found: r.field_disc().to_string(),
        });
    }
    Ok(k)
}

/// Checks that `f` defines the cyclic cubic field of conductor ℓ.
pub fn verify_cubic_field(f: &IntPoly, ell: &Int) -> Result<NumberField> {
    let k = NumberField::new(f)?;
    if k.degree() != 3 {
        return Err(Error::DegreeOutOfRange(k.degree()));
    }
    let want = ell * ell;
    if k.field_disc() != &want {
        return Err(Error::WrongDiscriminant {
            field: "L".into(),
            expected: want.to_string(),
            found: k.field_disc().to_string(),
        });
    }
    Ok(k)
}

fn labels(f: &NumberField, ell: &Int) -> Result<SplittingLabels> {
    let three = f.factor_rational_prime(&Int::from(3))?;
    let pat = |ps: &[PrimeIdeal]| ps.iter().map(|q| (q.e, q.f)).collect::<Vec<_>>();
    let t1 = three.iter().find(|q| q.e == 1 && q.f == 3);
    let t2 = three.iter().find(|q| q.e == 1 && q.f == 1);
    let (Some(t1), Some(t2), 2) = (t1, t2, three.len()) else {
        return Err(Error::WrongSplitting {
            p: "3".into(),
            detail: format!("expected 3₁(f=3)·3₂(f=1), found (e,f) = {:?}", pat(&three)),
        });
    };
    let ls = f.factor_rational_prime(ell)?;
    let l1 = ls.iter().find(|q| q.e == 1 && q.f == 1);
    let l2 = ls.iter().find(|q| q.e == 3 && q.f == 1);
    let (Some(l1), Some(l2), 2) = (l1, l2, ls.len()) else {
        return Err(Error::WrongSplitting {
            p: ell.to_string(),
            detail: format!("expected ℓ₁·ℓ₂³, found (e,f) = {:?}", pat(&ls)),
        });
    };
    Ok(SplittingLabels { three1: t1.clone(), three2: t2.clone(), ell1: l1.clone(), ell2: l2.clone() })
}

fn units_from_coords(f: &NumberField, coords: &[Vec<Int>]) -> Result<UnitData> {
    let r = f.degree() - 1;
    if coords.len() != r {
        return Err(Error::Config(format!("expected {r} units, got {}", coords.len())));
    }
    for u in coords {
        if u.len() != f.degree() || !f.norm(u).abs().is_one() {
            return Err(Error::Verification("supplied unit does not have norm ±1".into()));
        }
    }
    let logs: Vec<Vec<f64>> = coords.iter().map(|u| log_vector(f, u)).collect();
    if log_rank(&logs) != r {
        return Err(Error::Verification("supplied units are dependent".into()));
    }
    let regulator = crate::class::log_det(&logs).abs();
    Ok(UnitData { units: coords.to_vec(), regulator })
}

/// Builds and verifies all data for the conductor in `config`.
pub fn load_conductor(config: &Config) -> Result<ConductorData> {
    load_conductor_cached(config, None)
}

/// As [`load_conductor`], reading and writing the field-data cache in
/// `cache`. Cached polynomials and units are re-verified, never trusted.
pub fn load_conductor_cached(config: &Config, cache: Option<&Path>) -> Result<ConductorData> {
    let ell_u = config.ell;
    let ell = Int::from(ell_u);
    if !is_prime(ell_u) {
        return Err(Error::NotPrime(ell.to_string()));
    }
    if ell_u % 3 != 1 {
        return Err(Error::InvalidArgument(format!("{ell_u} is not 1 mod 3")));
    }
    let record = match cache {
        Some(dir) => FieldRecord::read(dir, ell_u)?,
        None => None,
    };
    let l = match config.cubic()? {
        Some(p) => verify_cubic_field(&p, &ell)?,
        None => cubic_subfield(&ell)?,
    };
    let class_l = class_group(&l)?;
    let h = class_l.class_number();
    if !h.is_multiple_of(&Int::from(4)) {
        return Err(Error::ClassNumberCondition { h: h.to_string() });
    }
    let cached_quartic = record.as_ref().map(|r| -> Result<IntPoly> {
        Ok(IntPoly::new(r.quartic.poly.iter().map(|c| c.parse::<Int>()).collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config("cache record polynomial".into()))?))
    });
    let f = match (config.quartic()?, cached_quartic) {
        (Some(p), _) => verify_quartic_field(&p, &ell)?,
        (None, Some(p)) => verify_quartic_field(&p?, &ell)?,
        (None, None) => quartic_field_search(&ell, config.search_bound)?,
    };
    if let Some(r) = &record {
        if !r.quartic.matches(&f) || !r.cubic.matches(&l) {
            return Err(Error::Config(format!("cache record for {ell_u} disagrees with the fields")));
        }
    }
    let labels = labels(&f, &ell)?;
    let class_f = class_group(&f)?;
    let cached_units: Option<Vec<Vec<Int>>> = record.as_ref().and_then(|r| {
        (!r.quartic.units.is_empty())
            .then(|| r.quartic.units.iter().map(|u| u.iter().map(|x| x.parse().unwrap_or_default()).collect()).collect())
    });
    let units_f = match (config.unit_coords()?, cached_units) {
        (Some(u), _) | (None, Some(u)) => units_from_coords(&f, &u)?,
        (None, None) => unit_group(&f)?,
    };
    let excl = [labels.three1.clone(), labels.ell2.clone()];
    let sunits = SUnitData::new(&f, &class_f, &units_f, &excl)?;
    let tau_mod = Modulus::new(&f, vec![(labels.three1.clone(), 2), (labels.ell2.clone(), 1)])?;
    let tau = ray_class_3_quotient_with(&f, &tau_mod, sunits.clone())?;
    if tau.dimension() != 1 {
        return Err(Error::RayDimension { expected: 1, found: tau.dimension() });
    }
    let rest = tame_ramified(&f)?;
    if !exponent_stability(&f, &class_f, &units_f, &labels.three1, &rest, 2, 3)? {
        return Err(Error::UnstableModulus);
    }
    let mut excluded = vec![3, ell_u];
    for (p, _) in crate::arith::factor(f.index())? {
        let p = p.to_u64().unwrap();
        if !excluded.contains(&p) {
            excluded.push(p);
        }
    }
    excluded.sort_unstable();
    let fast = FastData::new(&f, &labels, &sunits)?;
    let cd = ConductorData {
        ell: ell_u,
        shanks: shanks_param(&ell),
        l,
        f,
        class_l,
        class_f,
        units_f,
        labels,
        external_flags: config.external_flags.clone(),
        sunits,
        tau,
        fast,
        excluded,
    };
    if let (Some(dir), None) = (cache, &record) {
        cd.field_record().write(dir, ell_u)?;
    }
    Ok(cd)
}

/// Classification through generic ideal arithmetic: prime decomposition,
/// exact ray class quotients and their Artin maps.
pub fn classify_prime(cd: &ConductorData, v: u64) -> Result<Outcome> {
    if !is_prime(v) {
        return Err(Error::NotPrime(v.to_string()));
    }
    if cd.excluded.contains(&v) {
        return Ok(Outcome::Skipped(v));
    }
    if v % 3 != 1 {
        return Ok(Outcome::Classified(PrimeClassification::outside(v)));
    }
    let f = &cd.f;
    let ps = f.factor_rational_prime(&Int::from(v))?;
    let v1 = ps.iter().find(|q| q.f == 3);
    let v2 = ps.iter().find(|q| q.f == 1);
    let (Some(v1), Some(v2), 2) = (v1, v2, ps.len()) else {
        return Ok(Outcome::Classified(PrimeClassification::outside(v)));
    };
    let taubar = artin_vector(f, &cd.tau, &v1.ideal)?.iter().all(|&x| x == 0);
    let sunits = if cd.sunits.contains_prime(v2) || cd.sunits.contains_prime(v1) {
        let excl = [cd.labels.three1.clone(), cd.labels.ell2.clone(), v1.clone(), v2.clone()];
        SUnitData::new(f, &cd.class_f, &cd.units_f, &excl)?
    } else {
        cd.sunits.clone()
    };
    let m = Modulus::new(f, vec![(cd.labels.three1.clone(), 2), (v2.clone(), 1)])?;
    let q = ray_class_3_quotient_with(f, &m, sunits)?;
    let lambda = artin_vector(f, &q, &v1.ideal)?.iter().any(|&x| x != 0);
    Ok(Outcome::Classified(PrimeClassification::inside(v, lambda, taubar)))
}

/// Same contract as [`classify_prime`], through cubic residue symbols modulo
/// `v` and floating-point lattice reduction. Falls back to the generic path
/// for small `v` or when no smooth element turns up.
pub fn fast_classify(cd: &ConductorData, v: u64) -> Result<Outcome> {
    if cd.excluded.contains(&v) {
        return Ok(Outcome::Skipped(v));
    }
    match cd.fast.classify(&cd.f, &cd.sunits, v)? {
        Some(c) => Ok(Outcome::Classified(c)),
        None => classify_prime(cd, v),
    }
}

/// One conductor in the scanner report.
#[derive(Clone, Debug, Serialize)]
pub struct ScanEntry {
    pub ell: u64,
    pub class_group: Vec<String>,
    pub class_number: String,
    pub two_rank: usize,
    pub shanks_param: Option<String>,
    /// `4 | h_L`.
    pub passes: bool,
}

/// Class groups of the cyclic cubic fields of prime conductor ℓ ≤ `max_ell`.
pub fn scan_conductors(max_ell: u64) -> Result<Vec<ScanEntry>> {
    if max_ell > 2000 {
        return Err(Error::InvalidArgument("scanner is limited to conductors up to 2000".into()));
    }
    let mut out = Vec::new();
    for ell in crate::arith::primes_in_range(7, max_ell) {
        if ell % 3 != 1 {
            continue;
        }
        let e = Int::from(ell);
        let l = cubic_subfield(&e)?;
        let cg = class_group(&l)?;
        let h = cg.class_number();
        out.push(ScanEntry {
            ell,
            class_group: cg.divisors().iter().map(|d| d.to_string()).collect(),
            two_rank: cg.two_rank(),
            passes: h.is_multiple_of(&Int::from(4)),
            class_number: h.to_string(),
            shanks_param: shanks_param(&e).map(|a| a.to_string()),
        });
    }
    Ok(out)
}

/// One diagonal cubic field.
#[derive(Clone, Debug, Serialize)]
pub struct DiagonalField {
    /// Coefficients, leading first.
    pub poly: Vec<String>,
    pub disc: String,
    pub class_group: Vec<String>,
    pub two_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalReport {
    pub l1: u64,
    pub l2: u64,
    pub fields: Vec<DiagonalField>,
    /// Both 2-ranks are below 2.
    pub passes: bool,
}

/// The two diagonal cubic fields of conductor `l1·l2` and their 2-ranks.
pub fn diagonal_check(l1: u64, l2: u64) -> Result<DiagonalReport> {
    let fields = diagonal_cubics(l1, l2)?;
    let mut out = Vec::new();
    for k in &fields {
        let want = Int::from(l1 * l2).pow(2);
        if k.field_disc() != &want {
            return Err(Error::WrongDiscriminant {
                field: "diagonal field".into(),
                expected: want.to_string(),
                found: k.field_disc().to_string(),
            });
        }
        let cg = class_group(k)?;
        out.push(DiagonalField {
            poly: k.poly().coeffs().iter().rev().map(|c| c.to_string()).collect(),
            disc: k.field_disc().to_string(),
            class_group: cg.divisors().iter().map(|d| d.to_string()).collect(),
            two_rank: two_rank(cg.divisors()),
        });
    }
    let passes = out.iter().all(|d| d.two_rank < 2);
    Ok(DiagonalReport { l1, l2, fields: out, passes })
}

/// Conjugacy classes of `A₄` as permutations of four points: sizes and the
/// proportion of elements of order 3, used for the density of `C3`.
pub fn a4_class_sizes() -> Vec<(usize, u32)> {
    // (class size, element order), computed by enumerating the even permutations
    let perms = even_permutations();
    let mut classes: Vec<Vec<[usize; 4]>> = Vec::new();
    for p in &perms {
        if classes.iter().any(|c| c.contains(p)) {
            continue;
        }
        let mut c: Vec<[usize; 4]> = perms.iter().map(|g| conj(g, p)).collect();
        c.sort_unstable();
        c.dedup();
        classes.push(c);
    }
    let mut out: Vec<(usize, u32)> = classes.iter().map(|c| (c.len(), order(&c[0]))).collect();
    out.sort_unstable();
    out
}

/// Density of primes with Frobenius of order 3 and `v ≡ 1 mod 3`: half of
/// the primes, times the two order-3 classes, each of size 4 out of 12.
pub fn c3_density() -> num_rational::Ratio<i64> {
    let classes = a4_class_sizes();
    let total: usize = classes.iter().map(|c| c.0).sum();
    let order3: usize = classes.iter().filter(|c| c.1 == 3).map(|c| c.0).sum();
    num_rational::Ratio::new(1, 2) * num_rational::Ratio::new(order3 as i64, total as i64)
}

fn even_permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut s = p;
                    s.sort_unstable();
                    if s != [0, 1, 2, 3] {
                        continue;
                    }
                    let inv = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                    if inv % 2 == 0 {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn conj(g: &[usize; 4], p: &[usize; 4]) -> [usize; 4] {
    // g p g⁻¹
    let mut ginv = [0; 4];
    for i in 0..4 {
        ginv[g[i]] = i;
    }
    let mut out = [0; 4];
    for i in 0..4 {
        out[i] = g[p[ginv[i]]];
    }
    out
}

fn order(p: &[usize; 4]) -> u32 {
    let mut q = *p;
    let mut k = 1;
    while q != [0, 1, 2, 3] {
        let mut r = [0; 4];
        for i in 0..4 {
            r[i] = p[q[i]];
        }
        q = r;
        k += 1;
    }
    k
}
