//! LLL reduction with parameter 3/4.
//!
//! [`lll_gram`] is the exact integral variant working on a Gram matrix, so it
//! applies to any positive definite integral quadratic form (here the trace
//! form of a totally real field). [`lll_f64`] is the floating-point variant
//! used on hot paths where the basis is small and well conditioned.


use super::matrix::Matrix;
use crate::scalar::Scalar;

/// Integral LLL on the Gram matrix of a basis of full rank.
///
/// Returns the unimodular `H` such that the rows of `H·B` form an LLL-reduced
/// basis (where `G = B·Bᵀ`), together with the reduced Gram matrix.
pub fn lll_gram<T: Scalar>(gram: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = gram.rows();
    let mut g = gram.clone();
    let mut h = Matrix::<T>::identity(n);
    if n <= 1 {
        return (h, g);
    }
    // d[0] = 1, d[i+1] = d_i of the 1-based description
    let mut d: Vec<T> = vec![T::zero(); n + 1];
    let mut lam = Matrix::<T>::zeros(n, n);
    d[0] = T::one();
    d[1] = g[(0, 0)].clone();
    let mut k = 1usize;
    let mut kmax = 0usize;
    let four = T::from_i64(4).unwrap();
    let three = T::from_i64(3).unwrap();
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = g[(k, j)].clone();
                for i in 0..j {
                    u = (d[i + 1].clone() * u - lam[(k, i)].clone() * lam[(j, i)].clone()) / d[i].clone();
                }
                if j < k {
                    lam[(k, j)] = u;
                } else {
                    assert!(!u.is_zero(), "lll_gram: basis vectors are dependent");
                    d[k + 1] = u;
                }
            }
        }
        loop {
            redi(&mut g, &mut h, &mut lam, &d, k, k - 1);
            let l = lam[(k, k - 1)].clone();
            let lhs = four.clone() * d[k + 1].clone() * d[k - 1].clone();
            let rhs = three.clone() * d[k].clone() * d[k].clone() - four.clone() * l.clone() * l;
            if lhs < rhs {
                swapi(&mut g, &mut h, &mut lam, &mut d, k, kmax);
                if k > 1 {
                    k -= 1;
                }
            } else {
                for l in (0..k.saturating_sub(1)).rev() {
                    redi(&mut g, &mut h, &mut lam, &d, k, l);
                }
                k += 1;
                break;
            }
        }
    }
    (h, g)
}

fn round_div<T: Scalar>(a: &T, b: &T) -> T {
    // nearest integer to a/b for b > 0, ties towards +∞
    let two = T::one() + T::one();
    (two.clone() * a.clone() + b.clone()).div_floor(&(two * b.clone()))
}

fn redi<T: Scalar>(g: &mut Matrix<T>, h: &mut Matrix<T>, lam: &mut Matrix<T>, d: &[T], k: usize, l: usize) {
    let two = T::one() + T::one();
    if (two * lam[(k, l)].clone()).abs() <= d[l + 1] {
        return;
    }
    let q = round_div(&lam[(k, l)], &d[l + 1]);
    let n = g.rows();
    for j in 0..n {
        h[(k, j)] = h[(k, j)].clone() - q.clone() * h[(l, j)].clone();
    }
    // b_k <- b_k - q b_l on the Gram matrix: row then column
    for j in 0..n {
        g[(k, j)] = g[(k, j)].clone() - q.clone() * g[(l, j)].clone();
    }
    for i in 0..n {
        g[(i, k)] = g[(i, k)].clone() - q.clone() * g[(i, l)].clone();
    }
    lam[(k, l)] = lam[(k, l)].clone() - q.clone() * d[l + 1].clone();
    for i in 0..l {
        lam[(k, i)] = lam[(k, i)].clone() - q.clone() * lam[(l, i)].clone();
    }
}

fn swapi<T: Scalar>(g: &mut Matrix<T>, h: &mut Matrix<T>, lam: &mut Matrix<T>, d: &mut [T], k: usize, kmax: usize) {
    h.swap_rows(k, k - 1);
    g.swap_rows(k, k - 1);
    g.swap_cols(k, k - 1);
    for j in 0..k.saturating_sub(1) {
        let t = lam[(k, j)].clone();
        lam[(k, j)] = lam[(k - 1, j)].clone();
        lam[(k - 1, j)] = t;
    }
    let l = lam[(k, k - 1)].clone();
    let b = (d[k - 1].clone() * d[k + 1].clone() + l.clone() * l.clone()) / d[k].clone();
    for i in k + 1..=kmax {
        let t = lam[(i, k)].clone();
        lam[(i, k)] = (d[k + 1].clone() * lam[(i, k - 1)].clone() - l.clone() * t.clone()) / d[k].clone();
        lam[(i, k - 1)] = (b.clone() * t + l.clone() * lam[(i, k)].clone()) / d[k + 1].clone();
    }
    d[k] = b;
}

/// Floating-point LLL on explicit real vectors (rows of `b`).
///
/// Returns the integer transformation `H` with `H·b` reduced. Suitable for
/// dimension ≤ 8 and entries below about 10¹².
pub fn lll_f64(b: &[Vec<f64>]) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut basis: Vec<Vec<f64>> = b.to_vec();
    let mut h: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let gso = |basis: &[Vec<f64>]| {
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        let mut nrm = vec![0.0; n];
        for i in 0..n {
            let mut v = basis[i].clone();
            for j in 0..i {
                mu[i][j] = dot(&basis[i], &bstar[j]) / nrm[j];
                for (a, c) in v.iter_mut().zip(&bstar[j]) {
                    *a -= mu[i][j] * c;
                }
            }
            nrm[i] = dot(&v, &v);
            bstar.push(v);
        }
        (mu, nrm)
    };
    let (mut mu, mut nrm) = gso(&basis);
    let mut k = 1;
    let mut guard = 0;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                for t in 0..basis[k].len() {
                    basis[k][t] -= q * basis[j][t];
                }
                for t in 0..n {
                    h[k][t] -= qi * h[j][t];
                }
                for t in 0..=j {
                    mu[k][t] -= q * if t == j { 1.0 } else { mu[j][t] };
                }
            }
        }
        if nrm[k] < (0.75 - mu[k][k - 1] * mu[k][k - 1]) * nrm[k - 1] {
            basis.swap(k, k - 1);
            h.swap(k, k - 1);
            (mu, nrm) = gso(&basis);
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_lll_reduces_skewed_basis() {
        let b = Matrix::from_rows(vec![vec![1i64, 0, 0], vec![4, 1, 0], vec![1, 7, 1]]).map(|&x| x as i128);
        let b = b.map(|&x| x);
        let g = b.mul(&b.transpose());
        let (h, gr) = lll_gram(&g);
        assert_eq!(h.det().abs(), 1);
        assert_eq!(h.mul(&g).mul(&h.transpose()), gr);
        // the lattice is Z³, so a reduced basis consists of unit vectors
        for i in 0..3 {
            assert_eq!(gr[(i, i)], 1);
        }
    }

    #[test]
    fn f64_lll_agrees_on_unimodular_lattice() {
        let b = vec![vec![1.0, 0.0], vec![1000.0, 1.0]];
        let h = lll_f64(&b);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        assert_eq!(det.abs(), 1);
        let v: Vec<f64> = (0..2).map(|j| h[0][0] as f64 * b[0][j] + h[0][1] as f64 * b[1][j]).collect();
        assert!(v.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-9);
    }
}
