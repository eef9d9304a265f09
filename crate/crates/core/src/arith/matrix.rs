//! Dense matrices over a [`Ring`], with lattice reductions over [`Scalar`]
//! integers: determinant, Hermite and Smith normal forms, integer kernels.

use std::ops::{Index, IndexMut};


use crate::scalar::{Ring, Scalar};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    m[(i, j)] = m[(i, j)].clone() + a.clone() * o[(k, j)].clone();
                }
            }
        }
        m
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (i, x)| acc + x.clone() * self[(i, j)].clone())
            })
            .collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += c * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, c: &T) {
        for j in 0..self.cols {
            let v = self[(src, j)].clone() * c.clone();
            self[(dst, j)] = self[(dst, j)].clone() + v;
        }
    }

    /// `col[dst] += c * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, c: &T) {
        for i in 0..self.rows {
            let v = self[(i, src)].clone() * c.clone();
            self[(i, dst)] = self[(i, dst)].clone() + v;
        }
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

/// Replaces rows `(a, b)` by a unimodular combination leaving `gcd` at column
/// `col` of row `a` and zero in row `b`.
fn gcd_rows<T: Scalar>(rows: &mut [Vec<T>], a: usize, b: usize, col: usize) {
    let x = rows[a][col].clone();
    let y = rows[b][col].clone();
    let e = x.extended_gcd(&y);
    let (g, s, t) = (e.gcd, e.x, e.y);
    let (xa, yb) = (x / g.clone(), y / g);
    let n = rows[a].len();
    for j in 0..n {
        let ra = rows[a][j].clone();
        let rb = rows[b][j].clone();
        rows[a][j] = s.clone() * ra.clone() + t.clone() * rb.clone();
        rows[b][j] = yb.clone() * ra - xa.clone() * rb;
    }
}

impl<T: Scalar> Matrix<T> {
    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[(i, j)].clone() * a[(k, k)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                    a[(i, j)] = v / prev.clone();
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    /// Hermite normal form of the row lattice.
    ///
    /// The returned rows form a basis of the lattice. Each row has a positive
    /// pivot at its last nonzero column, pivot columns increase with the row
    /// index, and every entry sharing a column with a pivot of an earlier row
    /// lies in `[0, pivot)`. For a full-rank square lattice the result is
    /// lower triangular and its determinant is the product of the diagonal.
    pub fn hnf(&self) -> Self {
        let mut active: Vec<Vec<T>> = self.row_vecs().into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        let mut pivots: Vec<(usize, Vec<T>)> = Vec::new();
        for col in (0..self.cols).rev() {
            let idx: Vec<usize> = (0..active.len()).filter(|&i| !active[i][col].is_zero()).collect();
            if idx.is_empty() {
                continue;
            }
            let p = idx[0];
            for &i in &idx[1..] {
                gcd_rows(&mut active, p, i, col);
            }
            let mut prow = active.swap_remove(p);
            if prow[col].is_negative() {
                prow.iter_mut().for_each(|x| *x = -x.clone());
            }
            // reduce the column entry of rows holding later pivots
            for (_, r) in pivots.iter_mut() {
                let q = r[col].div_floor(&prow[col]);
                if !q.is_zero() {
                    for j in 0..=col {
                        r[j] = r[j].clone() - q.clone() * prow[j].clone();
                    }
                }
            }
            pivots.push((col, prow));
            active.retain(|r| r.iter().any(|x| !x.is_zero()));
        }
        pivots.sort_by_key(|(c, _)| *c);
        let rows: Vec<Vec<T>> = pivots.into_iter().map(|(_, r)| r).collect();
        if rows.is_empty() {
            return Matrix { rows: 0, cols: self.cols, data: vec![] };
        }
        Matrix::from_rows(rows)
    }

    pub fn rank(&self) -> usize {
        self.hnf().rows
    }

    /// Basis of the integer left kernel `{k : k·A = 0}`.
    pub fn left_kernel(&self) -> Self {
        let r = self.rows;
        let mut aug = Matrix::zeros(r, r + self.cols);
        for i in 0..r {
            aug[(i, i)] = T::one();
            for j in 0..self.cols {
                aug[(i, r + j)] = self[(i, j)].clone();
            }
        }
        let h = aug.hnf();
        let kern: Vec<Vec<T>> = h
            .row_vecs()
            .into_iter()
            .filter(|row| row[r..].iter().all(|x| x.is_zero()))
            .map(|row| row[..r].to_vec())
            .collect();
        if kern.is_empty() {
            return Matrix { rows: 0, cols: r, data: vec![] };
        }
        Matrix::from_rows(kern)
    }

    /// Smith normal form of a square nonsingular matrix: returns the
    /// elementary divisors `d_1 | d_2 | ... | d_n` and a unimodular `V` with
    /// `U·A·V = diag(d)` for some unimodular `U`.
    pub fn snf_with_right_transform(&self) -> (Vec<T>, Self) {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut v = Matrix::identity(n);
        for t in 0..n {
            loop {
                // smallest nonzero entry of the trailing block
                let mut best: Option<(usize, usize)> = None;
                for i in t..n {
                    for j in t..n {
                        if !a[(i, j)].is_zero()
                            && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    panic!("snf of singular matrix");
                };
                a.swap_rows(t, bi);
                a.swap_cols(t, bj);
                v.swap_cols(t, bj);
                let piv = a[(t, t)].clone();
                let mut clean = true;
                for i in t + 1..n {
                    let q = a[(i, t)].div_floor(&piv);
                    if !q.is_zero() {
                        a.add_row(i, t, &-q);
                    }
                    if !a[(i, t)].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..n {
                    let q = a[(t, j)].div_floor(&piv);
                    if !q.is_zero() {
                        a.add_col(j, t, &-q.clone());
                        v.add_col(j, t, &-q);
                    }
                    if !a[(t, j)].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    continue;
                }
                // divisibility condition on the trailing block
                let bad = (t + 1..n).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[(i, j)].is_multiple_of(&piv));
                match bad {
                    Some((i, _)) => a.add_row(t, i, &T::one()),
                    None => break,
                }
            }
            if a[(t, t)].is_negative() {
                for j in 0..n {
                    a[(t, j)] = -a[(t, j)].clone();
                }
            }
        }
        ((0..n).map(|i| a[(i, i)].clone()).collect(), v)
    }
}


/// Hermite normal form of the lattice spanned by `rows` together with
/// `d·Zⁿ`, where `d` is a positive multiple of the lattice index.
///
/// Same shape as [`Matrix::hnf`] for a full-rank lattice: square, lower
/// triangular, positive diagonal dividing `d`, and entries left of each
/// diagonal reduced into `[0, pivot)`. Intermediate entries stay below `d`.
pub fn hnf_mod<T: Scalar>(rows: &[Vec<T>], n: usize, d: &T) -> Matrix<T> {
    assert!(d.is_positive());
    let mut basis: Vec<Vec<T>> = (0..n)
        .map(|c| {
            let mut r = vec![T::zero(); n];
            r[c] = d.clone();
            r
        })
        .collect();
    for row in rows {
        let mut x: Vec<T> = row.iter().map(|v| v.mod_floor(d)).collect();
        for c in (0..n).rev() {
            if x[c].is_zero() {
                continue;
            }
            let b = &basis[c];
            let e = b[c].extended_gcd(&x[c]);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (bc, xc) = (b[c].clone() / g.clone(), x[c].clone() / g.clone());
            let mut nb = vec![T::zero(); n];
            let mut nx = vec![T::zero(); n];
            for j in 0..=c {
                nb[j] = (s.clone() * b[j].clone() + t.clone() * x[j].clone()).mod_floor(d);
                nx[j] = (bc.clone() * x[j].clone() - xc.clone() * b[j].clone()).mod_floor(d);
            }
            // the pivot is gcd(b_c, x_c), which divides d; mod_floor keeps it
            if nb[c].is_zero() {
                nb[c] = d.clone();
            }
            basis[c] = nb;
            x = nx;
        }
    }
    // pivots must divide d: fold d·e_c back in when reduction hid a factor
    for c in 0..n {
        let g = basis[c][c].gcd(d);
        if g != basis[c][c] {
            let e = basis[c][c].extended_gcd(d);
            let row: Vec<T> = basis[c].iter().map(|v| (e.x.clone() * v.clone()).mod_floor(d)).collect();
            basis[c] = row;
            basis[c][c] = g;
        }
    }
    for k in 0..n {
        for c in (0..k).rev() {
            let q = basis[k][c].div_floor(&basis[c][c]);
            if !q.is_zero() {
                for j in 0..=c {
                    let v = basis[k][j].clone() - q.clone() * basis[c][j].clone();
                    basis[k][j] = v;
                }
            }
        }
    }
    Matrix::from_rows(basis)
}
