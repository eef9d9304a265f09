//! Unit groups from short elements of small norm.

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::relations::{log_rank, log_vector, reduced_basis, small_combinations};
use super::primes_up_to_norm;
use crate::arith::fnv1a;
use crate::error::{Error, Result};
use crate::field::{Elt, NumberField};

/// A full-rank system of independent units.
///
/// The units generate a subgroup of finite index in `O^*/±1`; whether that
/// index is prime to 3 is checked where it matters (see the ray class code).
#[derive(Clone, Debug)]
pub struct UnitData {
    pub units: Vec<Elt>,
    /// `|det|` of the log embedding with one place dropped.
    pub regulator: f64,
}

/// Searches for `n - 1` independent units of a totally real field.
pub fn unit_group(k: &NumberField) -> Result<UnitData> {
    let r = k.degree() - 1;
    let mut cands: Vec<Elt> = Vec::new();
    let basis = reduced_basis(k, &k.unit_ideal());
    for g in small_combinations(&basis, k, 3) {
        if k.norm(&g).abs().is_one() {
            cands.push(g);
        }
    }
    // quotients of generators of principal ideals of small norm
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(k.field_disc().to_string().as_bytes()) ^ 0x5eed);
    let small = primes_up_to_norm(k, 60.0)?;
    let mut rounds = 0;
    while log_rank(&cands.iter().map(|u| log_vector(k, u)).collect::<Vec<_>>()) < r || rounds < 8 {
        rounds += 1;
        if rounds > 400 {
            return Err(Error::UnitSearch(format!("found {} independent units, need {r}", log_rank(
                &cands.iter().map(|u| log_vector(k, u)).collect::<Vec<_>>()
            ))));
        }
        let mut a = k.unit_ideal();
        if !small.is_empty() {
            for _ in 0..rng.gen_range(1..=2) {
                a = k.ideal_mul(&a, &small[rng.gen_range(0..small.len())].ideal)?;
            }
        }
        let gens: Vec<Elt> = small_combinations(&reduced_basis(k, &a), k, 2)
            .into_iter()
            .filter(|g| &k.norm(g).abs() == a.norm())
            .collect();
        for g in gens.iter().skip(1) {
            if let Some(u) = k.div_exact(g, &gens[0]) {
                cands.push(u);
            }
        }
    }
    let units = lattice_basis(k, &cands, r)?;
    let logs: Vec<Vec<f64>> = units.iter().map(|u| log_vector(k, u)).collect();
    let regulator = log_det(&logs).abs();
    if regulator < 1e-9 {
        return Err(Error::UnitSearch("units are dependent".into()));
    }
    Ok(UnitData { units, regulator })
}

/// A basis of the group generated by `cands` modulo torsion.
fn lattice_basis(k: &NumberField, cands: &[Elt], r: usize) -> Result<Vec<Elt>> {
    if r == 0 {
        return Ok(vec![]);
    }
    // shortest independent starting set
    let mut sorted: Vec<&Elt> = cands.iter().collect();
    sorted.sort_by(|a, b| norm2(&log_vector(k, a)).partial_cmp(&norm2(&log_vector(k, b))).unwrap());
    let mut start: Vec<Elt> = Vec::new();
    for u in &sorted {
        let mut trial: Vec<Vec<f64>> = start.iter().map(|x| log_vector(k, x)).collect();
        trial.push(log_vector(k, u));
        if log_rank(&trial) == trial.len() {
            start.push((*u).clone());
            if start.len() == r {
                break;
            }
        }
    }
    if start.len() < r {
        return Err(Error::UnitSearch("rank deficient".into()));
    }
    let base: Vec<Vec<f64>> = start.iter().map(|x| log_vector(k, x)).collect();
    // rational coordinates of every candidate in the starting basis
    let mut den = 1i64;
    let mut coords: Vec<Vec<f64>> = Vec::new();
    for u in cands {
        let c = solve_f64(&base, &log_vector(k, u));
        let d = (1..=60).find(|d| c.iter().all(|x| ((x * *d as f64) - (x * *d as f64).round()).abs() < 1e-6));
        if let Some(d) = d {
            den = num_integer::lcm(den, d);
            coords.push(c);
        } else {
            coords.push(vec![]);
        }
    }
    // integer echelon form of the scaled coordinates, mirrored on the units
    let mut rows: Vec<(Vec<i64>, Elt)> = Vec::new();
    for (i, u) in start.iter().enumerate() {
        let mut v = vec![0i64; r];
        v[i] = den;
        rows.push((v, u.clone()));
    }
    for (c, u) in coords.iter().zip(cands) {
        if !c.is_empty() {
            rows.push((c.iter().map(|x| (x * den as f64).round() as i64).collect(), u.clone()));
        }
    }
    let mut basis: Vec<(Vec<i64>, Elt)> = Vec::new();
    for col in 0..r {
        let Some(p) = rows.iter().position(|(v, _)| v[col] != 0) else {
            return Err(Error::UnitSearch("echelon lost rank".into()));
        };
        let mut piv = rows.swap_remove(p);
        let mut i = 0;
        while i < rows.len() {
            if rows[i].0[col] == 0 {
                i += 1;
                continue;
            }
            // Euclid on the column, carrying the units along
            let q = rows[i].0[col].div_euclid(piv.0[col]);
            reduce(k, &mut rows[i], &piv, q)?;
            if rows[i].0[col] != 0 {
                std::mem::swap(&mut rows[i], &mut piv);
            } else {
                i += 1;
            }
        }
        basis.push(piv);
    }
    Ok(basis.into_iter().map(|(_, u)| u).collect())
}

/// `row -= q·piv`, i.e. `u ← u·π^{-q}`.
fn reduce(k: &NumberField, row: &mut (Vec<i64>, Elt), piv: &(Vec<i64>, Elt), q: i64) -> Result<()> {
    if q == 0 {
        return Ok(());
    }
    for (a, b) in row.0.iter_mut().zip(&piv.0) {
        *a -= q * b;
    }
    let p = k.pow(&piv.1, q.unsigned_abs());
    row.1 = if q > 0 {
        k.div_exact(&row.1, &p).ok_or_else(|| Error::UnitSearch("inexact unit division".into()))?
    } else {
        k.mul(&row.1, &p)
    };
    Ok(())
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Solves `c · base = target` in least squares sense for square `base`.
fn solve_f64(base: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let r = base.len();
    // columns of the system are the basis vectors
    let mut a: Vec<Vec<f64>> = (0..r).map(|j| {
        let mut row: Vec<f64> = (0..r).map(|i| base[i][j]).collect();
        row.push(target[j]);
        row
    }).collect();
    for c in 0..r {
        let p = (c..r).max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap()).unwrap();
        a.swap(c, p);
        for i in 0..r {
            if i != c {
                let f = a[i][c] / a[c][c];
                for j in c..=r {
                    a[i][j] -= f * a[c][j];
                }
            }
        }
    }
    (0..r).map(|i| a[i][r] / a[i][i]).collect()
}

pub fn log_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap()).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    det
}

