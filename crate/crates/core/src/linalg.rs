//! Linear algebra over an ordered field.

use num_bigint::BigInt;

use crate::lattice::Matrix;
use crate::scalar::Scalar;

pub fn to_field<S: Scalar>(m: &Matrix<BigInt>) -> Matrix<S> {
    m.map(S::from_bigint)
}

pub fn vec_to_field<S: Scalar>(v: &[BigInt]) -> Vec<S> {
    v.iter().map(S::from_bigint).collect()
}

/// Reduced row echelon form; returns the pivot columns.
fn rref<S: Scalar>(rows: &mut [Vec<S>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// One solution of `a x = b` (free variables set to zero), if any.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut rows: Vec<Vec<S>> = (0..a.rows())
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows, n);
    if rows[pivots.len()..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![S::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rows[r][n].clone();
    }
    Some(x)
}

pub fn field_rank<S: Scalar>(a: &Matrix<S>) -> usize {
    let mut rows = a.to_rows();
    rref(&mut rows, a.cols()).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn solves_consistent_systems() {
        let a = Matrix::from_rows(2, &[vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]]).unwrap();
        let x = solve(&a, &[q(3, 1), q(6, 1)]).unwrap();
        assert_eq!(x, vec![q(3, 1), q(0, 1)]);
        assert!(solve(&a, &[q(3, 1), q(5, 1)]).is_none());
        assert_eq!(field_rank(&a), 1);
    }

    #[test]
    fn solves_over_floats() {
        let a = Matrix::from_rows(2, &[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(solve(&a, &[1.0, 1.0]), Some(vec![0.5, 0.25]));
    }
}
