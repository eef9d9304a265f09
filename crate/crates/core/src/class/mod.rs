//! Class groups and unit groups of totally real fields of small degree.
//!
//! Relations come from short vectors of LLL-reduced ideals whose cofactors
//! split over a factor base. The relation lattice is put in modular HNF and
//! its Smith form gives the group. Before a result is returned the structure
//! must survive half again as many extra relations, and every prime below
//! the Minkowski bound must be shown to lie in the span of the factor base.

mod relations;
mod units;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::matrix::{hnf_mod, Matrix};
use crate::arith::{fnv1a, fp, primes_in_range};
use crate::error::{Error, Result};
use crate::field::{Elt, IdealHNF, NumberField, PrimeIdeal};
use crate::Int;

pub use relations::{log_rank, log_vector, reduced_basis, small_combinations, FactorBase};
pub use units::{log_det, unit_group, UnitData};

/// Primes below this norm always join the factor base.
const FB_MIN_NORM: f64 = 30.0;
/// Factor base norm cap; primes between this and the Minkowski bound are
/// handled by the generation check instead.
const FB_MAX_NORM: f64 = 80.0;
const RANK_PRIME: u64 = 2_305_843_009_213_693_951;

/// A relation `(γ) = ∏ 𝔭_i^{e_i}` over the factor base.
#[derive(Clone, Debug)]
pub struct Relation {
    pub element: Elt,
    pub exponents: Vec<i64>,
}

/// Class group `⊕ Z/d_i` with a coordinate map on ideals.
#[derive(Clone, Debug)]
pub struct ClassGroupData {
    divisors: Vec<Int>,
    fb: FactorBase,
    /// All primes of norm up to the Minkowski bound with their coordinates.
    small: FactorBase,
    small_coords: Vec<Vec<Int>>,
    hnf: Matrix<Int>,
    essential: Vec<usize>,
    snf_all: Vec<Int>,
    v: Matrix<Int>,
    relations: Vec<Relation>,
    field_id: u64,
    seed: u64,
}

/// Number of even elementary divisors.
pub fn two_rank(divisors: &[Int]) -> usize {
    divisors.iter().filter(|d| d.is_even()).count()
}

impl ClassGroupData {
    /// Elementary divisors `d_1 | d_2 | …`, all greater than one.
    pub fn divisors(&self) -> &[Int] {
        &self.divisors
    }

    pub fn class_number(&self) -> Int {
        self.divisors.iter().fold(Int::one(), |a, b| a * b)
    }

    pub fn two_rank(&self) -> usize {
        two_rank(&self.divisors)
    }

    /// `dim Cl ⊗ F_3`.
    pub fn three_rank(&self) -> usize {
        self.divisors.iter().filter(|d| d.is_multiple_of(&Int::from(3))).count()
    }

    pub fn factor_base(&self) -> &FactorBase {
        &self.fb
    }

    /// Every prime ideal of norm below the Minkowski bound.
    pub fn small_primes(&self) -> &FactorBase {
        &self.small
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Class of `∏ 𝔭_i^{x_i}` over the factor base.
    pub fn fb_coordinates(&self, x: &[i64]) -> Vec<Int> {
        let xb: Vec<Int> = x.iter().map(|&v| Int::from(v)).collect();
        self.coords_of_vector(&xb)
    }

    /// Class coordinates of a prime in the small-prime list.
    pub fn small_prime_coordinates(&self, i: usize) -> &[Int] {
        &self.small_coords[i]
    }

    fn coords_of_vector(&self, x: &[Int]) -> Vec<Int> {
        let n = self.fb.len();
        let mut x = x.to_vec();
        for c in (0..n).rev() {
            if self.hnf[(c, c)].is_one() && !x[c].is_zero() {
                let q = x[c].clone();
                for j in 0..=c {
                    x[j] -= &q * &self.hnf[(c, j)];
                }
            }
        }
        let xe: Vec<Int> = self.essential.iter().map(|&c| x[c].clone()).collect();
        let y = self.v.vec_mul(&xe);
        y.iter()
            .zip(&self.snf_all)
            .filter(|(_, d)| !d.is_one())
            .map(|(t, d)| t.mod_floor(d))
            .collect()
    }

    fn add_coords(&self, a: &[Int], b: &[Int], k: &Int) -> Vec<Int> {
        a.iter().zip(b).zip(&self.divisors).map(|((x, y), d)| (x + k * y).mod_floor(d)).collect()
    }

    fn zero_coords(&self) -> Vec<Int> {
        vec![Int::zero(); self.divisors.len()]
    }

    /// Class of an arbitrary integral ideal, as a vector in `⊕ Z/d_i`.
    pub fn ideal_class_coordinates(&self, k: &NumberField, a: &IdealHNF) -> Result<Vec<Int>> {
        if a.field_id() != self.field_id || k.id() != self.field_id {
            return Err(Error::MixedFields);
        }
        if self.divisors.is_empty() {
            return Ok(vec![]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(a.norm().to_string().as_bytes()));
        for attempt in 0..200 {
            // twist by a random factor base element after the first attempt
            let mut twist = vec![0i64; self.fb.len()];
            let mut b = a.clone();
            if attempt > 0 {
                for _ in 0..1 + attempt.min(3) {
                    let i = rng.gen_range(0..self.fb.len());
                    twist[i] += 1;
                    b = k.ideal_mul(&b, &self.fb.primes[i].ideal)?;
                }
            }
            let basis = reduced_basis(k, &b);
            let radius = if attempt < 3 { 2 } else { 1 };
            for g in small_combinations(&basis, k, radius) {
                let norm = k.norm(&g);
                if norm.is_zero() {
                    continue;
                }
                let Some(d) = self.small.factor_cofactor(k, &g, &norm, Some(&b)) else {
                    continue;
                };
                // [a] = -[twist] - [d]
                let mut c = self.fb_coordinates(&twist);
                for (i, e) in d.iter().enumerate() {
                    if *e != 0 {
                        c = self.add_coords(&c, &self.small_coords[i], &Int::from(*e));
                    }
                }
                return Ok(c.iter().zip(&self.divisors).map(|(x, m)| (-x).mod_floor(m)).collect());
            }
        }
        Err(Error::RelationSearch("no smooth element found for ideal class".into()))
    }

    pub fn is_principal(&self, k: &NumberField, a: &IdealHNF) -> Result<bool> {
        Ok(self.ideal_class_coordinates(k, a)?.iter().all(|x| x.is_zero()))
    }
}

/// Every prime ideal with norm at most `bound`.
pub fn primes_up_to_norm(k: &NumberField, bound: f64) -> Result<Vec<PrimeIdeal>> {
    let hi = bound.floor().max(1.0) as u64;
    let mut out = Vec::new();
    for p in primes_in_range(2, hi) {
        for q in k.factor_rational_prime(&Int::from(p))? {
            if q.norm().to_f64().unwrap() <= bound {
                out.push(q);
            }
        }
    }
    out.sort_by_key(|a| a.norm());
    Ok(out)
}

/// Class group of `k`, with relation randomness seeded by the discriminant.
pub fn class_group(k: &NumberField) -> Result<ClassGroupData> {
    let mink = k.minkowski_bound();
    let small_primes = primes_up_to_norm(k, mink)?;
    let b0 = mink.min(FB_MAX_NORM.max(FB_MIN_NORM));
    let fb_primes: Vec<PrimeIdeal> =
        small_primes.iter().filter(|q| q.norm().to_f64().unwrap() <= b0).cloned().collect();
    let seed = fnv1a(k.field_disc().to_string().as_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fb = FactorBase::new(fb_primes);
    let small = FactorBase::new(small_primes);
    let n = fb.len();

    if n == 0 {
        // Minkowski bound below 2: every class contains an ideal of norm one
        return Ok(ClassGroupData {
            divisors: vec![],
            small_coords: vec![vec![]; small.len()],
            fb,
            small,
            hnf: Matrix::zeros(0, 0),
            essential: vec![],
            snf_all: vec![],
            v: Matrix::zeros(0, 0),
            relations: vec![],
            field_id: k.id(),
            seed,
        });
    }

    let mut rels: Vec<Relation> = rational_relations(k, &fb);
    let mut effort = 1;
    loop {
        let cg = relation_rounds(k, &fb, &small, &mut rng, &mut rels, effort, seed)?;
        if let Some(cg) = cg {
            return Ok(cg);
        }
        effort += 1;
        if effort > 6 {
            return Err(Error::RelationSearch("class group failed its consistency checks".into()));
        }
    }
}

/// The trivial relations `(p) = ∏ 𝔭^e` for rational primes fully in the base.
fn rational_relations(k: &NumberField, fb: &FactorBase) -> Vec<Relation> {
    let mut ps: Vec<Int> = fb.primes.iter().map(|q| q.p.clone()).collect();
    ps.dedup();
    ps.into_iter()
        .filter(|p| fb.covers(k, p))
        .map(|p| {
            let exponents = fb.primes.iter().map(|q| if q.p == p { q.e as i64 } else { 0 }).collect();
            Relation { element: k.from_int(&p), exponents }
        })
        .collect()
}

/// One pass of relation collection at a given effort level; `None` when the
/// result fails a consistency check and more relations are needed.
fn relation_rounds(
    k: &NumberField,
    fb: &FactorBase,
    small: &FactorBase,
    rng: &mut ChaCha8Rng,
    rels: &mut Vec<Relation>,
    effort: usize,
    seed: u64,
) -> Result<Option<ClassGroupData>> {
    let n = fb.len();
    // every prime should occur in a few relations of its own
    let per_prime = 4 * effort;
    for i in 0..n {
        let mut tries = 0;
        while rels.iter().filter(|r| r.exponents[i] != 0).count() < per_prime && tries < 40 * effort {
            tries += 1;
            collect_around(k, fb, i, rng, rels)?;
        }
    }
    let target = rels.len().max(n + 10 * effort);
    collect_relations(k, fb, rng, rels, target)?;
    let mut tries = 0;
    while fp::rank(&rels_mod_p(rels), RANK_PRIME) < n {
        tries += 1;
        if tries > 50 {
            return Err(Error::RelationSearch(format!("relation matrix stuck below rank {n}")));
        }
        let want = rels.len() + n;
        collect_relations(k, fb, rng, rels, want)?;
    }
    let mut d = independent_det(rels, n);
    let mut h = hnf_mod(&exps(rels), n, &d);
    d = diag_product(&h);
    let mut structure = smith(&h);
    let mut rounds = 0;
    loop {
        let want = rels.len() + rels.len() / 2;
        collect_relations(k, fb, rng, rels, want)?;
        let h2 = hnf_mod(&exps(rels), n, &d);
        let s2 = smith(&h2);
        let stable = s2.0 == structure.0;
        h = h2;
        d = diag_product(&h);
        structure = s2;
        if stable {
            break;
        }
        rounds += 1;
        if rounds > 20 {
            return Err(Error::RelationSearch("class group structure did not stabilize".into()));
        }
    }
    let (essential, snf_all, v) = structure.1;
    let divisors: Vec<Int> = snf_all.iter().filter(|x| !x.is_one()).cloned().collect();
    let mut cg = ClassGroupData {
        divisors,
        fb: fb.clone(),
        small_coords: vec![],
        small: small.clone(),
        hnf: h,
        essential,
        snf_all,
        v,
        relations: rels.clone(),
        field_id: k.id(),
        seed,
    };
    cg.small_coords = generation_check(k, &cg, rng)?;
    // every pO is principal
    let mut by_p: std::collections::BTreeMap<Int, (u32, Vec<Int>)> = Default::default();
    for (q, c) in small.primes.iter().zip(&cg.small_coords) {
        let ent = by_p.entry(q.p.clone()).or_insert((0, cg.zero_coords()));
        ent.0 += q.e * q.f;
        ent.1 = cg.add_coords(&ent.1, c, &Int::from(q.e));
    }
    let consistent = by_p
        .values()
        .filter(|(deg, _)| *deg as usize == k.degree())
        .all(|(_, c)| c.iter().all(|x| x.is_zero()));
    Ok(consistent.then_some(cg))
}

/// Relations from short elements of `𝔭_i·𝔠` for random `𝔠`.
pub(crate) fn collect_around(
    k: &NumberField,
    fb: &FactorBase,
    i: usize,
    rng: &mut ChaCha8Rng,
    rels: &mut Vec<Relation>,
) -> Result<()> {
    let mut a = fb.primes[i].ideal.clone();
    for _ in 0..rng.gen_range(0..=2) {
        let j = rng.gen_range(0..fb.len());
        a = k.ideal_mul(&a, &fb.primes[j].ideal)?;
    }
    let basis = reduced_basis(k, &a);
    for g in small_combinations(&basis, k, 1) {
        let norm = k.norm(&g);
        if norm.is_zero() {
            continue;
        }
        if let Some(e) = fb.factor_element(k, &g, &norm) {
            if e.iter().any(|&x| x != 0) {
                rels.push(Relation { element: g, exponents: e });
            }
        }
    }
    Ok(())
}

type SmithData = (Vec<Int>, (Vec<usize>, Vec<Int>, Matrix<Int>));

/// Smith form of the essential part of a full-rank lower triangular HNF.
fn smith(h: &Matrix<Int>) -> SmithData {
    let n = h.rows();
    let essential: Vec<usize> = (0..n).filter(|&c| !h[(c, c)].is_one()).collect();
    let pos: Vec<Option<usize>> = (0..n).map(|c| essential.iter().position(|&e| e == c)).collect();
    let m = essential.len();
    let mut rows = Vec::with_capacity(m);
    for &c in &essential {
        // substitute away the trivial generators below c
        let mut x = h.row(c).to_vec();
        for j in (0..c).rev() {
            if h[(j, j)].is_one() && !x[j].is_zero() {
                let q = x[j].clone();
                for t in 0..=j {
                    x[t] -= &q * &h[(j, t)];
                }
            }
        }
        let mut r = vec![Int::zero(); m];
        for (j, val) in x.into_iter().enumerate() {
            if let Some(pj) = pos[j] {
                r[pj] = val;
            }
        }
        rows.push(r);
    }
    if m == 0 {
        return (vec![], (essential, vec![], Matrix::zeros(0, 0)));
    }
    let (d, v) = Matrix::from_rows(rows).snf_with_right_transform();
    let divs: Vec<Int> = d.iter().filter(|x| !x.is_one()).cloned().collect();
    (divs, (essential, d, v))
}

fn diag_product(h: &Matrix<Int>) -> Int {
    (0..h.rows()).map(|i| h[(i, i)].clone()).fold(Int::one(), |a, b| a * b)
}

fn exps(rels: &[Relation]) -> Vec<Vec<Int>> {
    rels.iter().map(|r| r.exponents.iter().map(|&x| Int::from(x)).collect()).collect()
}

fn rels_mod_p(rels: &[Relation]) -> Vec<Vec<u64>> {
    rels.iter()
        .map(|r| r.exponents.iter().map(|&x| x.rem_euclid(RANK_PRIME as i64) as u64).collect())
        .collect()
}

/// `|det|` of `n` linearly independent relations.
fn independent_det(rels: &[Relation], n: usize) -> Int {
    let mut chosen: Vec<Vec<u64>> = Vec::new();
    let mut picked = Vec::new();
    let all = rels_mod_p(rels);
    for (i, r) in all.iter().enumerate() {
        let mut trial = chosen.clone();
        trial.push(r.clone());
        if fp::rank(&trial, RANK_PRIME) == trial.len() {
            chosen = trial;
            picked.push(i);
            if picked.len() == n {
                break;
            }
        }
    }
    let rows: Vec<Vec<Int>> =
        picked.iter().map(|&i| rels[i].exponents.iter().map(|&x| Int::from(x)).collect()).collect();
    Matrix::from_rows(rows).det().abs()
}

/// Adds relations until there are `target` of them.
pub(crate) fn collect_relations(
    k: &NumberField,
    fb: &FactorBase,
    rng: &mut ChaCha8Rng,
    rels: &mut Vec<Relation>,
    target: usize,
) -> Result<()> {
    let mut attempts = 0usize;
    let limit = 200 + 50 * target;
    while rels.len() < target {
        attempts += 1;
        if attempts > limit {
            return Err(Error::RelationSearch(format!("found {} of {} relations", rels.len(), target)));
        }
        let mut a = k.unit_ideal();
        let factors = rng.gen_range(1..=3);
        for _ in 0..factors {
            let i = rng.gen_range(0..fb.len());
            a = k.ideal_mul(&a, &fb.primes[i].ideal)?;
        }
        let basis = reduced_basis(k, &a);
        // random short combinations so that repeated ideals still give new relations
        for _ in 0..12 {
            let mut g = k.zero();
            for b in &basis {
                let c: i64 = rng.gen_range(-2..=2);
                if c != 0 {
                    g = k.add(&g, &k.scale(b, &Int::from(c)));
                }
            }
            let norm = k.norm(&g);
            if norm.is_zero() {
                continue;
            }
            if let Some(e) = fb.factor_element(k, &g, &norm) {
                if e.iter().any(|&x| x != 0) {
                    rels.push(Relation { element: g, exponents: e });
                }
            }
        }
    }
    Ok(())
}

/// Shows that each prime up to the Minkowski bound lies in the subgroup
/// generated by smaller primes, and returns every small prime's coordinates.
fn generation_check(k: &NumberField, cg: &ClassGroupData, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<Int>>> {
    let small = &cg.small.primes;
    let mut coords: Vec<Vec<Int>> = Vec::with_capacity(small.len());
    for (i, q) in small.iter().enumerate() {
        if let Some(j) = cg.fb.primes.iter().position(|f| f == q) {
            let mut e = vec![0i64; cg.fb.len()];
            e[j] = 1;
            coords.push(cg.fb_coordinates(&e));
            continue;
        }
        // primes of strictly smaller norm (all earlier in the sorted list)
        let allowed = FactorBase::new(small[..i].to_vec());
        let c = express_prime(k, q, &allowed, cg, &coords, rng).ok_or_else(|| {
            Error::RelationSearch(format!("prime of norm {} not generated by smaller primes", q.norm()))
        })?;
        coords.push(c);
    }
    Ok(coords)
}

fn express_prime(
    k: &NumberField,
    q: &PrimeIdeal,
    allowed: &FactorBase,
    cg: &ClassGroupData,
    coords: &[Vec<Int>],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Int>> {
    for attempt in 0..100 {
        let mut b = q.ideal.clone();
        let mut twist = cg.zero_coords();
        if attempt > 0 && !allowed.is_empty() {
            let j = rng.gen_range(0..allowed.len());
            b = k.ideal_mul(&b, &allowed.primes[j].ideal).ok()?;
            twist = coords[j].clone();
        }
        let basis = reduced_basis(k, &b);
        for g in small_combinations(&basis, k, if attempt == 0 { 2 } else { 1 }) {
            let norm = k.norm(&g);
            if norm.is_zero() {
                continue;
            }
            if let Some(d) = allowed.factor_cofactor(k, &g, &norm, Some(&b)) {
                // [q] = -[twist] - Σ d_j [q_j]
                let mut c = twist.clone();
                for (j, e) in d.iter().enumerate() {
                    if *e != 0 {
                        c = cg.add_coords(&c, &coords[j], &Int::from(*e));
                    }
                }
                return Some(c.iter().zip(&cg.divisors).map(|(x, m)| (-x).mod_floor(m)).collect());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::cubic_subfield;

    fn divs(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn cyclic_cubic_class_groups() {
        for (ell, expect) in [(7, vec![]), (163, vec![2, 2]), (277, vec![2, 2]), (349, vec![2, 2]), (31, vec![])] {
            let l = cubic_subfield(&Int::from(ell)).unwrap();
            let cg = class_group(&l).unwrap();
            assert_eq!(cg.divisors(), &divs(&expect)[..], "ell = {ell}");
        }
    }

    #[test]
    fn ramified_prime_principal_in_l163() {
        let l = cubic_subfield(&Int::from(163)).unwrap();
        let cg = class_group(&l).unwrap();
        let q = &l.factor_rational_prime(&Int::from(163)).unwrap()[0];
        assert_eq!(q.e, 3);
        assert!(cg.is_principal(&l, &q.ideal).unwrap());
        assert!(cg.is_principal(&l, &l.principal_ideal(&l.theta())).unwrap());
    }

    #[test]
    fn coordinates_are_additive() {
        let l = cubic_subfield(&Int::from(277)).unwrap();
        let cg = class_group(&l).unwrap();
        let ps = primes_up_to_norm(&l, 200.0).unwrap();
        for a in ps.iter().take(6) {
            for b in ps.iter().skip(3).take(6) {
                let ab = l.ideal_mul(&a.ideal, &b.ideal).unwrap();
                let ca = cg.ideal_class_coordinates(&l, &a.ideal).unwrap();
                let cb = cg.ideal_class_coordinates(&l, &b.ideal).unwrap();
                let cab = cg.ideal_class_coordinates(&l, &ab).unwrap();
                assert_eq!(cab, cg.add_coords(&ca, &cb, &Int::one()));
            }
        }
    }

    #[test]
    fn units_of_cubic() {
        let l = cubic_subfield(&Int::from(163)).unwrap();
        let u = unit_group(&l).unwrap();
        assert_eq!(u.units.len(), 2);
        for e in &u.units {
            assert!(l.norm(e).abs().is_one());
        }
    }
}
