//! Dense matrices over any [`Scalar`].
//!
//! Elimination routines take an optional tolerance. `None` means exact
//! arithmetic (first nonzero pivot); `Some(tol)` selects the pivot of largest
//! magnitude and treats entries with `|v| <= tol` as zero.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for r in 0..self.rows {
            l.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        l.finish()
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &mut self.data[r * self.cols + c]
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    pub matrix: Matrix<S>,
    pub pivots: Vec<usize>,
}

impl<S> Matrix<S> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Elementary matrix `E_ij` (0-based), a single one at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = S::one();
        m
    }

    pub fn diagonal(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::dims(c, row.len()));
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Matrix of integers, handy for fixtures.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let c = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), c, |i, j| S::from_int(rows[i][j]))
    }

    /// Block diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &Matrix<S>, b: &Matrix<S>) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m[(a.rows + i, a.cols + j)] = b[(i, j)].clone();
            }
        }
        m
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<S>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        for c in cols {
            if c.len() != n {
                return Err(Error::dims(n, c.len()));
            }
        }
        Ok(Self::from_fn(n, cols.len(), |r, c| cols[c][r].clone()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|v| v.is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(S::magnitude).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(self.zip(o, |a, b| a.clone() + b.clone()))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(self.zip(o, |a, b| a.clone() - b.clone()))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::dims(self.cols, o.rows));
        }
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let v = m[(i, j)].clone() + a.clone() * b.clone();
                    m[(i, j)] = v;
                }
            }
        }
        Ok(m)
    }

    /// Panicking product for internally consistent shapes.
    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("matrix product shape")
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("matrix sum shape")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("matrix difference shape")
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone())
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::dims(self.cols, v.len()));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// Commutator `[self, o] = self·o − o·self`.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        self.try_mul(o)?.try_sub(&o.try_mul(self)?)
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows {
            return Err(Error::dims(self.rows, o.rows));
        }
        if self.cols != o.cols {
            return Err(Error::dims(self.cols, o.cols));
        }
        Ok(())
    }

    fn zip(&self, o: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn choose_pivot(&self, col: usize, from: usize, tol: Option<f64>) -> Option<usize> {
        match tol {
            None => (from..self.rows).find(|&r| !self[(r, col)].is_zero()),
            Some(t) => {
                let mut best: Option<(usize, f64)> = None;
                for r in from..self.rows {
                    let m = self[(r, col)].magnitude();
                    if m > t && best.is_none_or(|(_, bm)| m > bm) {
                        best = Some((r, m));
                    }
                }
                best.map(|(r, _)| r)
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form.
    pub fn rref(&self, tol: Option<f64>) -> Echelon<S> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = m.choose_pivot(c, r, tol) else {
                if tol.is_some() {
                    for i in r..m.rows {
                        m[(i, c)] = S::zero();
                    }
                }
                continue;
            };
            m.swap_rows(r, p);
            let inv = S::one() / m[(r, c)].clone();
            for j in c..m.cols {
                let v = m[(r, j)].clone() * inv.clone();
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
                m[(i, c)] = S::zero();
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self, tol: Option<f64>) -> usize {
        self.rref(tol).pivots.len()
    }

    /// Basis of `{v : self·v = 0}`.
    pub fn nullspace(&self, tol: Option<f64>) -> Vec<Vec<S>> {
        let e = self.rref(tol);
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![S::zero(); self.cols];
            v[free] = S::one();
            for (row, &p) in e.pivots.iter().enumerate() {
                v[p] = -e.matrix[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant by elimination (partial pivoting for inexact scalars).
    pub fn det(&self) -> Result<S> {
        if !self.is_square() {
            return Err(Error::shape("determinant of a non-square matrix"));
        }
        let n = self.rows;
        match n {
            0 => return Ok(S::one()),
            1 => return Ok(self[(0, 0)].clone()),
            2 => {
                return Ok(self[(0, 0)].clone() * self[(1, 1)].clone()
                    - self[(0, 1)].clone() * self[(1, 0)].clone())
            }
            _ => {}
        }
        let tol = if S::EXACT { None } else { Some(0.0) };
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = m.choose_pivot(c, c, tol) else {
                return Ok(S::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                let f = m[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                let f = f / piv.clone();
                for j in c + 1..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        Ok(det)
    }

    /// Inverse, or `None` when singular (relative to `tol` for inexact scalars).
    pub fn inverse(&self, tol: Option<f64>) -> Result<Option<Self>> {
        if !self.is_square() {
            return Err(Error::shape("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let e = aug.rref(tol);
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return Ok(None);
        }
        Ok(Some(Self::from_fn(n, n, |i, j| e.matrix[(i, n + j)].clone())))
    }

    /// Some solution of `self·v = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[S], tol: Option<f64>) -> Result<Option<Vec<S>>> {
        if b.len() != self.rows {
            return Err(Error::dims(self.rows, b.len()));
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let e = aug.rref(tol);
        if e.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut v = vec![S::zero(); self.cols];
        for (row, &p) in e.pivots.iter().enumerate() {
            v[p] = e.matrix[(row, self.cols)].clone();
        }
        Ok(Some(v))
    }
}

/// Rank of a list of vectors.
pub fn span_rank<S: Scalar>(vectors: &[Vec<S>], tol: Option<f64>) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    match Matrix::from_rows(vectors.to_vec()) {
        Ok(m) => m.rank(tol),
        Err(_) => 0,
    }
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span<S: Scalar>(basis: &[Vec<S>], v: &[S], tol: Option<f64>) -> bool {
    let mut all = basis.to_vec();
    let r = span_rank(&all, tol);
    all.push(v.to_vec());
    span_rank(&all, tol) == r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_i64_rows(rows)
    }

    #[test]
    fn determinant_and_inverse() {
        let m = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det().unwrap(), rat(18, 1));
        let inv = m.inverse(None).unwrap().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        let s = q(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]);
        assert_eq!(s.det().unwrap(), rat(0, 1));
        assert!(s.inverse(None).unwrap().is_none());
    }

    #[test]
    fn nullspace_basis() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = m.nullspace(None);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).unwrap().iter().all(|x| x.is_zero()));
        }
        assert_eq!(m.rank(None), 1);
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = q(&[&[1, 1], &[1, -1]]);
        let v = m.solve(&[rat(3, 1), rat(1, 1)], None).unwrap().unwrap();
        assert_eq!(v, vec![rat(2, 1), rat(1, 1)]);
        let s = q(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[rat(1, 1), rat(3, 1)], None).unwrap().is_none());
    }

    #[test]
    fn float_rank_with_tolerance() {
        let m = Matrix::<f64>::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-13]]).unwrap();
        assert_eq!(m.rank(Some(1e-9)), 1);
        assert_eq!(m.rank(Some(1e-15)), 2);
    }

    fn arb_int_matrix(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
        proptest::collection::vec(-4i64..5, n * n)
            .prop_map(move |v| Matrix::from_fn(n, n, |i, j| rat(v[i * n + j], 1)))
    }

    proptest! {
        #[test]
        fn det_is_multiplicative(a in arb_int_matrix(4), b in arb_int_matrix(4)) {
            prop_assert_eq!(a.mul(&b).det().unwrap(), a.det().unwrap() * b.det().unwrap());
        }

        #[test]
        fn rank_nullity(a in arb_int_matrix(5)) {
            prop_assert_eq!(a.rank(None) + a.nullspace(None).len(), 5);
        }
    }
}
