//! Dense linear algebra over a prime field `F_p`, rows as `Vec<u64>`.

use super::{inv_mod, mul_mod};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_multiple_of(p)) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c] % p, p).unwrap();
        for x in m[r].iter_mut() {
            *x = mul_mod(*x % p, inv, p);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_multiple_of(p) {
                let f = m[i][c] % p;
                for j in 0..cols {
                    let t = mul_mod(f, m[r][j], p);
                    m[i][j] = (m[i][j] % p + p - t) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<u64>], p: u64) -> usize {
    let mut a = m.to_vec();
    rref(&mut a, p).len()
}

/// Basis of the right kernel `{x : M·x = 0}`.
pub fn kernel(m: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a, p);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - a[r][free] % p) % p;
        }
        out.push(v);
    }
    out
}

/// Basis of the left kernel `{y : y·M = 0}`.
pub fn left_kernel(m: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    kernel(&transpose(m, cols), m.len(), p)
}

pub fn transpose(m: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// Some `y` with `y·M = b`, if one exists.
pub fn solve_left(m: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    // transpose system Mᵀ yᵀ = bᵀ, solved through an augmented RREF
    let rows = m.len();
    let cols = b.len();
    let mut aug: Vec<Vec<u64>> = (0..cols)
        .map(|j| {
            let mut r: Vec<u64> = m.iter().map(|row| row[j] % p).collect();
            r.push(b[j] % p);
            r
        })
        .collect();
    let pivots = rref(&mut aug, p);
    if pivots.contains(&rows) {
        return None;
    }
    let mut y = vec![0u64; rows];
    for (r, &pc) in pivots.iter().enumerate() {
        y[pc] = aug[r][rows];
    }
    Some(y)
}

pub fn dot(a: &[u64], b: &[u64], p: u64) -> u64 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| (acc + mul_mod(x % p, y % p, p)) % p)
}

/// Row vector times matrix.
pub fn vec_mul(v: &[u64], m: &[Vec<u64>], cols: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; cols];
    for (x, row) in v.iter().zip(m) {
        if x % p == 0 {
            continue;
        }
        for j in 0..cols {
            out[j] = (out[j] + mul_mod(*x % p, row[j] % p, p)) % p;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_solve() {
        let m = vec![vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 0]];
        assert_eq!(rank(&m, 3), 1);
        for k in kernel(&m, 3, 3) {
            for row in &m {
                assert_eq!(dot(row, &k, 3), 0);
            }
        }
        assert_eq!(left_kernel(&m, 3, 3).len(), 2);
        let y = solve_left(&m, &[2, 1, 0], 3).unwrap();
        assert_eq!(vec_mul(&y, &m, 3, 3), vec![2, 1, 0]);
        assert!(solve_left(&m, &[0, 0, 1], 3).is_none());
    }
}
