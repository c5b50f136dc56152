//! Exact integer linear algebra: dense matrices, Smith and Hermite normal
//! forms, saturated kernels and lattice membership.
//!
//! Everything here is generic over [`IntegerScalar`]; the rest of the crate
//! uses [`IntMatrix`](crate::IntMatrix), i.e. `Matrix<BigInt>`.

use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::IntegerScalar;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from row vectors. `cols` is needed for the empty case.
    pub fn from_rows(cols: usize, rows: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().cloned());
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Result<Self> {
        Ok(Matrix::from_rows(rows, cols)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    /// Submatrix made of the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.rows, cols: cols.len(), data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.cols * rows.len());
        for &i in rows {
            data.extend(self.row(i).iter().cloned());
        }
        Matrix { rows: rows.len(), cols: self.cols, data }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.extend(other.row(i).iter().cloned());
        }
        Ok(Matrix { rows: self.rows, cols: self.cols + other.cols, data })
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One + PartialEq> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + Mul<Output = T>,
{
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
                }
                data.push(acc);
            }
        }
        Ok(Matrix { rows: self.rows, cols: other.cols, data })
    }
}

impl<T> Mul for &Matrix<T>
where
    T: Clone + Zero + Mul<Output = T>,
{
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

pub fn dot<T: Clone + Zero + Mul<Output = T>>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Result of [`smith_normal_form`]: `u * m * v == d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm<T> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: IntegerScalar> SmithForm<T> {
    /// Nonzero diagonal entries `d1 | d2 | ...`.
    pub fn invariant_factors(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn row_axpy<T: IntegerScalar>(m: &mut Matrix<T>, target: usize, source: usize, q: &T) {
    // row[target] -= q * row[source]
    for j in 0..m.cols {
        let s = m.get(source, j).clone();
        if !s.is_zero() {
            let t = m.get(target, j).clone() - q.clone() * s;
            m.set(target, j, t);
        }
    }
}

fn col_axpy<T: IntegerScalar>(m: &mut Matrix<T>, target: usize, source: usize, q: &T) {
    for i in 0..m.rows {
        let s = m.get(i, source).clone();
        if !s.is_zero() {
            let t = m.get(i, target).clone() - q.clone() * s;
            m.set(i, target, t);
        }
    }
}

fn negate_row<T: IntegerScalar>(m: &mut Matrix<T>, i: usize) {
    for j in 0..m.cols {
        let e = -m.get(i, j).clone();
        m.set(i, j, e);
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivot rule: the entry of smallest nonzero absolute value in the active
/// submatrix, ties broken by row-major position.
pub fn smith_normal_form<T: IntegerScalar>(m: &Matrix<T>) -> SmithForm<T> {
    let (rows, cols) = m.shape();
    let mut d = m.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let e = d.get(i, j);
                    if e.is_zero() {
                        continue;
                    }
                    match pivot {
                        Some((pi, pj)) if d.get(pi, pj).abs() <= e.abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return SmithForm { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(&p);
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(&p);
                col_axpy(&mut d, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility chain: fold an offending row into the pivot row
            let mut offending = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !d.get(i, j).is_multiple_of(&p) {
                        offending = Some(i);
                        break 'scan;
                    }
                }
            }
            match offending {
                Some(i) => {
                    let minus_one = -T::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    SmithForm { u, d, v }
}

/// Row-style Hermite normal form of the lattice spanned by `vectors`.
///
/// Returns the nonzero rows: leading entries positive and strictly
/// increasing in column, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_basis<T: IntegerScalar>(dim: usize, vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut a: Vec<Vec<T>> = vectors.to_vec();
    debug_assert!(a.iter().all(|r| r.len() == dim));
    let n = a.len();
    let mut r = 0;
    for col in 0..dim {
        if r == n {
            break;
        }
        let mut found = false;
        loop {
            let best = (r..n)
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()).then(x.cmp(&y)));
            let Some(b) = best else { break };
            found = true;
            a.swap(r, b);
            let mut done = true;
            for i in r + 1..n {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x = x.clone() - q.clone() * y.clone();
                }
                if !a[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !found {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let pivot_row = a[r].clone();
        for i in 0..r {
            let q = a[i][col].div_floor(&pivot_row[col]);
            if q.is_zero() {
                continue;
            }
            for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                *x = x.clone() - q.clone() * y.clone();
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Basis of the (automatically saturated) lattice `{v : m v = 0}`, in
/// Hermite normal form.
pub fn kernel_basis<T: IntegerScalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let cols = m.cols();
    if cols == 0 {
        return Vec::new();
    }
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let raw: Vec<Vec<T>> = (rank..cols).map(|j| snf.v.column(j)).collect();
    hermite_basis(cols, &raw)
}

/// Integer coefficients `c` with `sum c_i basis_i == v`, or `None` when `v`
/// is not in the lattice. The basis vectors must be linearly independent.
pub fn lattice_membership<T: IntegerScalar>(basis: &[Vec<T>], v: &[T]) -> Result<Option<Vec<T>>> {
    let dim = v.len();
    if let Some(b) = basis.iter().find(|b| b.len() != dim) {
        return Err(Error::Dimension(format!(
            "basis vector of length {} against target of length {dim}",
            b.len()
        )));
    }
    let k = basis.len();
    if k == 0 {
        return Ok(v.iter().all(Zero::is_zero).then(Vec::new));
    }
    let b = Matrix::from_columns(dim, basis)?;
    let snf = smith_normal_form(&b);
    let w = snf.u.mul_vec(v);
    let mut y = Vec::with_capacity(k);
    for i in 0..dim {
        let di = if i < k { snf.d.get(i, i).clone() } else { T::zero() };
        if di.is_zero() {
            if !w[i].is_zero() {
                return Ok(None);
            }
            if i < k {
                y.push(T::zero());
            }
        } else {
            let (q, r) = w[i].div_rem(&di);
            if !r.is_zero() {
                return Ok(None);
            }
            y.push(q);
        }
    }
    Ok(Some(snf.v.mul_vec(&y)))
}

/// Inverse of a unimodular matrix, `None` if the matrix is not unimodular.
pub fn unimodular_inverse<T: IntegerScalar>(m: &Matrix<T>) -> Option<Matrix<T>> {
    if m.rows() != m.cols() {
        return None;
    }
    let snf = smith_normal_form(m);
    if !snf.d.is_identity() {
        return None;
    }
    Some(&snf.v * &snf.u)
}

/// Integer right inverse `r` of a surjection `pi: Z^n -> Z^m` (`pi * r == 1`).
pub fn right_inverse<T: IntegerScalar>(pi: &Matrix<T>) -> Option<Matrix<T>> {
    let m = pi.rows();
    let snf = smith_normal_form(pi);
    if (0..m).any(|i| i >= pi.cols() || !snf.d.get(i, i).is_one()) {
        return None;
    }
    let first: Vec<usize> = (0..m).collect();
    Some(&snf.v.select_columns(&first) * &snf.u)
}

/// Solves `x * pi == f` for integer `x`, where `pi` is surjective.
pub fn factor_through<T: IntegerScalar>(f: &Matrix<T>, pi: &Matrix<T>) -> Option<Matrix<T>> {
    if f.cols() != pi.cols() {
        return None;
    }
    let r = right_inverse(pi)?;
    let x = f * &r;
    (&x * pi == *f).then_some(x)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant<T: IntegerScalar>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return T::one();
    }
    let mut a = m.to_rows();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return T::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num / prev.clone();
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Rank over the rationals.
pub fn rank<T: IntegerScalar>(m: &Matrix<T>) -> usize {
    hermite_basis(m.cols(), &m.to_rows()).len()
}

/// Basis of the saturation `span_Q(vectors) ∩ Z^dim`.
pub fn saturated_span<T: IntegerScalar>(dim: usize, vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    let m = Matrix::from_rows(dim, vectors).expect("vector length mismatch");
    let perp = kernel_basis(&m);
    let perp_m = Matrix::from_rows(dim, &perp).expect("kernel vector length");
    kernel_basis(&perp_m)
}

/// Surjection `Z^dim -> Z^(dim - r)` whose kernel is the saturation of the
/// span of `vectors`; rows in Hermite normal form.
pub fn quotient_projection<T: IntegerScalar>(dim: usize, vectors: &[Vec<T>]) -> Matrix<T> {
    let m = Matrix::from_rows(dim, vectors).expect("vector length mismatch");
    let rows = kernel_basis(&m);
    Matrix::from_rows(dim, &rows).expect("kernel vector length")
}
