//! 3-elementary quotients of ray class groups with finite moduli.
//!
//! For a set `S` of primes prime to `𝔪` that generates the class group, the
//! map `Z^S ⊕ (O/𝔪)^* → Cl_𝔪` is onto with kernel the image of the `S`-units
//! `ρ ↦ (v(ρ), ρ⁻¹)`. Tensoring with `F_3` only needs `S`-units modulo cubes,
//! and a basis of those is certified by cubic residue characters at
//! auxiliary primes.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::matrix::Matrix;
use crate::arith::modp::CubicCharacter;
use crate::arith::{big_mod, fnv1a, fp, mul_mod, primes_in_range};
use crate::class::{
    collect_around, collect_relations, primes_up_to_norm, reduced_basis, small_combinations, ClassGroupData,
    FactorBase, Relation, UnitData,
};
use crate::error::{Error, Result};
use crate::field::{lattice_coords, Elt, IdealHNF, NumberField, PrimeIdeal};
use crate::Int;

/// Primes of norm up to this bound (besides those below the Minkowski bound)
/// make up the default `S`.
const S_NORM_BOUND: f64 = 50.0;

/// A finite modulus `∏ 𝔭^a`.
#[derive(Clone, Debug)]
pub struct Modulus {
    field_id: u64,
    parts: Vec<(PrimeIdeal, u32)>,
}

impl Modulus {
    /// Exponents must be 1 at primes not above 3.
    pub fn new(k: &NumberField, parts: Vec<(PrimeIdeal, u32)>) -> Result<Self> {
        for (p, a) in &parts {
            if *a == 0 {
                return Err(Error::InvalidArgument("modulus exponent must be positive".into()));
            }
            if p.p != Int::from(3) && *a != 1 {
                return Err(Error::InvalidArgument(format!("tame prime over {} needs exponent 1", p.p)));
            }
            if p.ideal.field_id() != k.id() {
                return Err(Error::MixedFields);
            }
        }
        Ok(Modulus { field_id: k.id(), parts })
    }

    pub fn trivial(k: &NumberField) -> Self {
        Modulus { field_id: k.id(), parts: vec![] }
    }

    pub fn parts(&self) -> &[(PrimeIdeal, u32)] {
        &self.parts
    }

    pub fn ideal(&self, k: &NumberField) -> Result<IdealHNF> {
        let mut m = k.unit_ideal();
        for (p, a) in &self.parts {
            m = k.ideal_mul(&m, &k.prime_power(p, *a)?)?;
        }
        Ok(m)
    }

    fn coprime_to(&self, k: &NumberField, a: &IdealHNF) -> bool {
        self.parts.iter().all(|(p, _)| !a.norm().is_multiple_of(&p.p) || k.ideal_valuation(p, a) == 0)
    }
}

/// `(O/𝔭^a)^* ⊗ F_3` as an explicit map.
#[derive(Clone, Debug)]
pub(crate) enum LocalLog {
    /// Prime-to-3 part is trivial after tensoring.
    Trivial,
    /// Degree-one prime of norm `q ≡ 1 mod 3`.
    Tame { functional: Vec<u64>, chi: CubicCharacter },
    /// Unramified prime over 3 with exponent at least 2: `x ↦ x^{N-1} - 1`
    /// in `𝔭/𝔭²`.
    Wild { norm: u64, p_basis: Matrix<Int>, v: Matrix<Int>, keep: Vec<usize> },
}

impl LocalLog {
    pub(crate) fn new(k: &NumberField, p: &PrimeIdeal, a: u32) -> Result<Self> {
        let three = Int::from(3);
        if p.p == three {
            if p.e != 1 {
                return Err(Error::Unsupported("prime over 3 is ramified".into()));
            }
            if a < 2 {
                return Ok(LocalLog::Trivial);
            }
            let p_basis = p.ideal.basis_matrix();
            let sq = k.prime_power(p, 2)?;
            let rows: Vec<Vec<Int>> = sq
                .basis()
                .iter()
                .map(|r| lattice_coords(&p_basis, r).expect("𝔭² ⊆ 𝔭"))
                .collect();
            let (d, v) = Matrix::from_rows(rows).snf_with_right_transform();
            let keep: Vec<usize> = (0..d.len()).filter(|&i| !d[i].is_one()).collect();
            debug_assert!(keep.iter().all(|&i| d[i] == three));
            debug_assert_eq!(keep.len(), p.f as usize);
            let norm = p.norm().to_u64().unwrap();
            return Ok(LocalLog::Wild { norm, p_basis, v, keep });
        }
        let q = p.norm();
        if !(&q - 1u32).is_multiple_of(&three) {
            return Ok(LocalLog::Trivial);
        }
        if p.f != 1 {
            return Err(Error::Unsupported("tame prime of residue degree > 1 with 3 | N - 1".into()));
        }
        let q = q.to_u64().ok_or_else(|| Error::Unsupported("tame prime too large".into()))?;
        let functional = p.residue_functional().unwrap();
        Ok(LocalLog::Tame { functional, chi: CubicCharacter::new(q) })
    }

    pub(crate) fn dim(&self) -> usize {
        match self {
            LocalLog::Trivial => 0,
            LocalLog::Tame { .. } => 1,
            LocalLog::Wild { keep, .. } => keep.len(),
        }
    }

    /// Log of an element prime to the modulus.
    pub(crate) fn eval(&self, k: &NumberField, x: &Elt) -> Vec<u64> {
        match self {
            LocalLog::Trivial => vec![],
            LocalLog::Tame { functional, chi } => {
                let q = chi.modulus();
                let r = x
                    .iter()
                    .zip(functional)
                    .fold(0u64, |s, (c, f)| (s + mul_mod(big_mod(c, q), *f, q)) % q);
                vec![chi.eval(r) as u64]
            }
            LocalLog::Wild { norm, p_basis, v, keep } => {
                let nine = Int::from(9);
                let base = k.reduce_mod(x, &nine);
                let mut y = k.one();
                let mut b = base;
                let mut e = norm - 1;
                while e > 0 {
                    if e & 1 == 1 {
                        y = k.reduce_mod(&k.mul(&y, &b), &nine);
                    }
                    b = k.reduce_mod(&k.mul(&b, &b), &nine);
                    e >>= 1;
                }
                let t = k.sub(&y, &k.one());
                let c = lattice_coords(p_basis, &t).expect("x^(N-1) ≡ 1 mod 𝔭");
                let w = v.vec_mul(&c);
                keep.iter().map(|&i| w[i].mod_floor(&Int::from(3)).to_u64().unwrap()).collect()
            }
        }
    }
}

/// Generators of `O_S^*` modulo cubes for a set `S` generating the class group.
#[derive(Clone, Debug)]
pub struct SUnitData {
    field_id: u64,
    s: FactorBase,
    gens: Vec<Elt>,
    vals: Vec<Vec<i64>>,
    unit_rank: usize,
    seed: u64,
}

impl SUnitData {
    /// Builds `S` from small primes, skipping `excluded`.
    pub fn new(k: &NumberField, cg: &ClassGroupData, u: &UnitData, excluded: &[PrimeIdeal]) -> Result<Self> {
        let bound = k.minkowski_bound().max(S_NORM_BOUND);
        let mut s: Vec<PrimeIdeal> =
            primes_up_to_norm(k, bound)?.into_iter().filter(|q| !excluded.contains(q)).collect();
        if !generates(k, cg, &s)? {
            // widen until the class group is generated
            let mut b = bound * 2.0;
            loop {
                s = primes_up_to_norm(k, b)?.into_iter().filter(|q| !excluded.contains(q)).collect();
                if generates(k, cg, &s)? {
                    break;
                }
                b *= 2.0;
                if b > 1e5 {
                    return Err(Error::RelationSearch("S does not generate the class group".into()));
                }
            }
        }
        let fb = FactorBase::new(s);
        let seed = fnv1a(format!("{}:{}", k.field_disc(), fb.len()).as_bytes());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rels: Vec<Relation> = Vec::new();
        let r = u.units.len();
        let need = r + fb.len();
        for round in 0..6 {
            for i in 0..fb.len() {
                for _ in 0..2 + round {
                    collect_around(k, &fb, i, &mut rng, &mut rels)?;
                }
            }
            let target = rels.len() + fb.len() + 10;
            collect_relations(k, &fb, &mut rng, &mut rels, target)?;
            let mut cands: Vec<(Elt, Vec<i64>)> =
                u.units.iter().map(|e| (e.clone(), vec![0i64; fb.len()])).collect();
            cands.extend(rels.iter().map(|r| (r.element.clone(), r.exponents.clone())));
            if let Some(basis) = certify(k, &fb, &cands, need)? {
                let (gens, vals) = basis.into_iter().unzip();
                return Ok(SUnitData { field_id: k.id(), s: fb, gens, vals, unit_rank: r, seed });
            }
        }
        Err(Error::UnitSaturation(format!("could not certify {need} S-units modulo cubes")))
    }

    pub fn primes(&self) -> &FactorBase {
        &self.s
    }

    /// Certified generators of `O_S^*/(O_S^*)^3`.
    pub fn generators(&self) -> &[Elt] {
        &self.gens
    }

    /// Valuations of each generator at the primes of `S`.
    pub fn valuations(&self) -> &[Vec<i64>] {
        &self.vals
    }

    pub fn unit_rank(&self) -> usize {
        self.unit_rank
    }

    pub fn contains_prime(&self, p: &PrimeIdeal) -> bool {
        self.s.primes.contains(p)
    }
}

/// Whether the classes of `s` generate the class group.
fn generates(k: &NumberField, cg: &ClassGroupData, s: &[PrimeIdeal]) -> Result<bool> {
    let d = cg.divisors();
    if d.is_empty() {
        return Ok(true);
    }
    let m = d.len();
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for q in s {
        rows.push(cg.ideal_class_coordinates(k, &q.ideal)?);
    }
    for (i, di) in d.iter().enumerate() {
        let mut r = vec![Int::zero(); m];
        r[i] = di.clone();
        rows.push(r);
    }
    let h = Matrix::from_rows(rows).hnf();
    let index = (0..h.rows()).map(|i| h[(i, i)].clone()).fold(Int::one(), |a, b| a * b);
    Ok(h.rows() == m && index.is_one())
}

/// An `S`-unit with its valuations on `S`.
type SUnit = (Elt, Vec<i64>);

/// Picks candidates independent modulo cubes, checked with cubic residue
/// characters at auxiliary degree-one primes outside `S`.
fn certify(
    k: &NumberField,
    s: &FactorBase,
    cands: &[SUnit],
    need: usize,
) -> Result<Option<Vec<SUnit>>> {
    let mut chars: Vec<(Vec<u64>, CubicCharacter)> = Vec::new();
    let excluded: Vec<Int> = s.primes.iter().map(|q| q.p.clone()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let max_chars = 4 * need + 40;
    let mut primes = primes_in_range(7, 1 << 40).filter(|q| q % 3 == 1);
    while chars.len() < max_chars {
        let q = primes.next().unwrap();
        let qi = Int::from(q);
        if excluded.contains(&qi) || k.index().is_multiple_of(&qi) || k.field_disc().is_multiple_of(&qi) {
            continue;
        }
        for pr in k.factor_rational_prime(&qi)? {
            if pr.f == 1 {
                chars.push((pr.residue_functional().unwrap(), CubicCharacter::new(q)));
            }
        }
        if chars.len() < need {
            continue;
        }
        // character table, then greedy independent selection
        rows = cands.iter().map(|(g, _)| chars.iter().map(|(f, chi)| char_of(g, f, chi)).collect()).collect();
        chosen.clear();
        let mut acc: Vec<Vec<u64>> = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            acc.push(r.clone());
            if fp::rank(&acc, 3) == acc.len() {
                chosen.push(i);
                if chosen.len() == need {
                    break;
                }
            } else {
                acc.pop();
            }
        }
        if chosen.len() == need {
            return Ok(Some(chosen.iter().map(|&i| cands[i].clone()).collect()));
        }
        if fp::rank(&rows, 3) < need && chars.len() > 2 * need + 20 {
            break;
        }
    }
    let _ = rows;
    Ok(None)
}

fn char_of(g: &Elt, functional: &[u64], chi: &CubicCharacter) -> u64 {
    let q = chi.modulus();
    let r = g.iter().zip(functional).fold(0u64, |s, (c, f)| (s + mul_mod(big_mod(c, q), *f, q)) % q);
    chi.eval(r) as u64
}

/// `Cl_𝔪 ⊗ F_3` together with the data to evaluate the Artin map.
#[derive(Clone, Debug)]
pub struct RayClass3Quotient {
    field_id: u64,
    modulus: Modulus,
    sunits: SUnitData,
    logs: Vec<LocalLog>,
    /// Functionals on `F_3^S ⊕ (O/𝔪)^* ⊗ F_3` vanishing on the relations.
    functionals: Vec<Vec<u64>>,
}

impl RayClass3Quotient {
    pub fn dimension(&self) -> usize {
        self.functionals.len()
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Prime ideals of smallest norm whose Artin images form a basis.
    pub fn generators(&self, k: &NumberField) -> Result<Vec<IdealHNF>> {
        find_generators(k, self)
    }

    /// The `S`-unit data the quotient was built from.
    pub fn s_units(&self) -> &SUnitData {
        &self.sunits
    }

    /// `dim (O/𝔪)^* ⊗ F_3`.
    pub fn local_dimension(&self) -> usize {
        self.logs.iter().map(|l| l.dim()).sum()
    }

    fn local_log(&self, k: &NumberField, x: &Elt) -> Vec<u64> {
        self.logs.iter().flat_map(|l| l.eval(k, x)).collect()
    }

    fn project(&self, w: &[u64]) -> Vec<u8> {
        self.functionals.iter().map(|f| fp::dot(f, w, 3) as u8).collect()
    }
}

pub fn ray_class_3_quotient(
    k: &NumberField,
    m: &Modulus,
    cg: &ClassGroupData,
    u: &UnitData,
) -> Result<RayClass3Quotient> {
    let excluded: Vec<PrimeIdeal> = m.parts.iter().map(|(p, _)| p.clone()).collect();
    let sunits = SUnitData::new(k, cg, u, &excluded)?;
    ray_class_3_quotient_with(k, m, sunits)
}

/// Same as [`ray_class_3_quotient`] with precomputed `S`-units; `S` must be
/// disjoint from the support of the modulus.
pub fn ray_class_3_quotient_with(k: &NumberField, m: &Modulus, sunits: SUnitData) -> Result<RayClass3Quotient> {
    if m.field_id != k.id() || sunits.field_id != k.id() {
        return Err(Error::MixedFields);
    }
    if m.parts.iter().any(|(p, _)| sunits.contains_prime(p)) {
        return Err(Error::InvalidArgument("S meets the modulus".into()));
    }
    let logs: Vec<LocalLog> = m.parts.iter().map(|(p, a)| LocalLog::new(k, p, *a)).collect::<Result<_>>()?;
    let ns = sunits.s.len();
    let mut q = RayClass3Quotient {
        field_id: k.id(),
        modulus: m.clone(),
        sunits,
        logs,
        functionals: vec![],
    };
    let rows: Vec<Vec<u64>> = q
        .sunits
        .gens
        .iter()
        .zip(&q.sunits.vals)
        .map(|(g, v)| {
            let mut r: Vec<u64> = v.iter().map(|x| x.rem_euclid(3) as u64).collect();
            r.extend(q.local_log(k, g).into_iter().map(|x| (3 - x) % 3));
            r
        })
        .collect();
    let cols = ns + q.local_dimension();
    q.functionals = fp::kernel(&rows, cols, 3);
    Ok(q)
}

fn find_generators(k: &NumberField, q: &RayClass3Quotient) -> Result<Vec<IdealHNF>> {
    let d = q.dimension();
    let mut gens = Vec::new();
    let mut images: Vec<Vec<u64>> = Vec::new();
    if d == 0 {
        return Ok(gens);
    }
    let mut consider = |a: &IdealHNF, img: Vec<u8>, gens: &mut Vec<IdealHNF>| {
        images.push(img.iter().map(|&x| x as u64).collect());
        if fp::rank(&images, 3) == images.len() {
            gens.push(a.clone());
        } else {
            images.pop();
        }
    };
    for p in primes_in_range(2, 100_000) {
        for pr in k.factor_rational_prime(&Int::from(p))? {
            if !q.modulus.coprime_to(k, &pr.ideal) {
                continue;
            }
            let img = artin_vector(k, q, &pr.ideal)?;
            consider(&pr.ideal, img, &mut gens);
            if gens.len() == d {
                return Ok(gens);
            }
        }
    }
    Err(Error::NotFound("generators of the ray class quotient".into()))
}

/// Image of an ideal prime to the modulus in `Cl_𝔪 ⊗ F_3 ≅ F_3^d`.
pub fn artin_vector(k: &NumberField, q: &RayClass3Quotient, a: &IdealHNF) -> Result<Vec<u8>> {
    if a.field_id() != q.field_id || k.id() != q.field_id {
        return Err(Error::MixedFields);
    }
    if !q.modulus.coprime_to(k, a) {
        return Err(Error::NotCoprime);
    }
    if q.dimension() == 0 {
        return Ok(vec![]);
    }
    let s = &q.sunits.s;
    let ns = s.len();
    // an S-prime maps to its basis vector
    if let Some(i) = s.primes.iter().position(|p| &p.ideal == a) {
        let mut w = vec![0u64; ns + q.local_dimension()];
        w[i] = 1;
        return Ok(q.project(&w));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(q.sunits.seed ^ fnv1a(a.norm().to_string().as_bytes()));
    for attempt in 0..200 {
        let mut twist = vec![0i64; ns];
        let mut b = a.clone();
        if attempt > 0 {
            for _ in 0..1 + attempt.min(3) {
                let i = rng.gen_range(0..ns);
                twist[i] += 1;
                b = k.ideal_mul(&b, &s.primes[i].ideal)?;
            }
        }
        let basis = reduced_basis(k, &b);
        for g in small_combinations(&basis, k, if attempt < 2 { 2 } else { 1 }) {
            let norm = k.norm(&g);
            if norm.is_zero() {
                continue;
            }
            let Some(d) = s.factor_cofactor(k, &g, &norm, Some(&b)) else {
                continue;
            };
            // (γ) = 𝔞 · twist · 𝔡, so [𝔞] = φ(-(twist + 𝔡), γ)
            let mut w: Vec<u64> = twist.iter().zip(&d).map(|(t, x)| (-(t + x)).rem_euclid(3) as u64).collect();
            w.extend(q.local_log(k, &g));
            return Ok(q.project(&w));
        }
    }
    Err(Error::RelationSearch("no smooth element for Artin map".into()))
}

/// 1 if the prime splits completely in the 3-elementary ray class field, 3
/// otherwise.
pub fn frobenius_residue_degree(k: &NumberField, q: &RayClass3Quotient, p: &PrimeIdeal) -> Result<u32> {
    let v = artin_vector(k, q, &p.ideal)?;
    Ok(if v.iter().all(|&x| x == 0) { 1 } else { 3 })
}

/// Whether the quotient for `𝔭^a` has the same dimension at exponents
/// `a_lo` and `a_hi`, with `rest` as the prime-to-𝔭 part of the modulus.
pub fn exponent_stability(
    k: &NumberField,
    cg: &ClassGroupData,
    u: &UnitData,
    p: &PrimeIdeal,
    rest: &[(PrimeIdeal, u32)],
    a_lo: u32,
    a_hi: u32,
) -> Result<bool> {
    let mut excluded: Vec<PrimeIdeal> = rest.iter().map(|(q, _)| q.clone()).collect();
    excluded.push(p.clone());
    let sunits = SUnitData::new(k, cg, u, &excluded)?;
    let mk = |a: u32| {
        let mut parts = rest.to_vec();
        parts.push((p.clone(), a));
        Modulus::new(k, parts)
    };
    let lo = ray_class_3_quotient_with(k, &mk(a_lo)?, sunits.clone())?;
    let hi = ray_class_3_quotient_with(k, &mk(a_hi)?, sunits)?;
    Ok(lo.dimension() == hi.dimension())
}

/// Exponent 2 versus 3 at a prime over 3. The reference modulus is `𝔭^a`
/// times the tamely ramified primes of the field whose norm is 1 mod 3,
/// the places where 1-units and residue characters can interact. Any failure
/// to compute counts as unstable.
pub fn modulus_stability_check(k: &NumberField, p: &PrimeIdeal) -> bool {
    if p.p != Int::from(3) {
        return false;
    }
    let run = || -> Result<bool> {
        let cg = crate::class::class_group(k)?;
        let u = crate::class::unit_group(k)?;
        let rest = tame_ramified(k)?;
        exponent_stability(k, &cg, &u, p, &rest, 2, 3)
    };
    run().unwrap_or(false)
}

/// Ramified primes not over 3 with norm 1 mod 3, each with exponent 1.
pub fn tame_ramified(k: &NumberField) -> Result<Vec<(PrimeIdeal, u32)>> {
    let mut out = Vec::new();
    for (p, _) in crate::arith::factor(k.field_disc())? {
        if p == Int::from(3) {
            continue;
        }
        for pr in k.factor_rational_prime(&p)? {
            if pr.e > 1 && pr.f == 1 && (pr.norm() - 1u32).is_multiple_of(&Int::from(3)) {
                out.push((pr, 1));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::{class_group, unit_group};
    use crate::IntPoly;

    fn quartic(ell: i64) -> NumberField {
        let c: &[i64] = match ell {
            163 => &[9, 2, -7, -1, 1],
            277 => &[12, 4, -11, -1, 1],
            349 => &[20, 3, -10, -1, 1],
            _ => unreachable!(),
        };
        NumberField::new(&IntPoly::from_i64s(c)).unwrap()
    }

    fn labels(f: &NumberField, ell: i64) -> (PrimeIdeal, PrimeIdeal, PrimeIdeal) {
        let t = f.factor_rational_prime(&Int::from(3)).unwrap();
        let three1 = t.iter().find(|p| p.f == 3).unwrap().clone();
        let three2 = t.iter().find(|p| p.f == 1).unwrap().clone();
        let l = f.factor_rational_prime(&Int::from(ell)).unwrap();
        let ell2 = l.iter().find(|p| p.e == 3).unwrap().clone();
        (three1, three2, ell2)
    }

    #[test]
    fn fixed_modulus_has_dimension_one() {
        for ell in [163, 277, 349] {
            let f = quartic(ell);
            let cg = class_group(&f).unwrap();
            let u = unit_group(&f).unwrap();
            let (t1, _, l2) = labels(&f, ell);
            let m = Modulus::new(&f, vec![(t1, 2), (l2, 1)]).unwrap();
            let q = ray_class_3_quotient(&f, &m, &cg, &u).unwrap();
            assert_eq!(q.dimension(), 1, "ell = {ell}");
            let triv = ray_class_3_quotient(&f, &Modulus::trivial(&f), &cg, &u).unwrap();
            assert_eq!(triv.dimension(), 0);
        }
    }

    #[test]
    fn stability_at_three() {
        let f = quartic(163);
        let (t1, t2, _) = labels(&f, 163);
        assert!(modulus_stability_check(&f, &t1));
        assert!(modulus_stability_check(&f, &t2));
        let cg = class_group(&f).unwrap();
        let u = unit_group(&f).unwrap();
        let (_, _, l2) = labels(&f, 163);
        assert!(!exponent_stability(&f, &cg, &u, &t1, &[(l2, 1)], 1, 2).unwrap());
    }
}
