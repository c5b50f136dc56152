//! Hilbert bases of pointed rational cones.
//!
//! Every irreducible element of `C ∩ Z^d` is either a generator or a lattice
//! point of the half-open parallelepiped of some simplicial subcone spanned
//! by `d` independent generators. Those points are enumerated exactly from
//! the Smith form of the subcone matrix, then reduced in increasing degree
//! for a grading that is positive on the cone.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{cone_facets, in_cone, Vector};
use crate::error::{Error, Result};
use crate::lattice::{self, dot, Matrix};

/// Minimal generating set of `cone(generators) ∩ Z^rank`, sorted.
///
/// The cone need not be full dimensional; it must be pointed.
pub fn hilbert_basis(rank: usize, generators: &[Vector]) -> Result<Vec<Vector>> {
    if let Some(v) = generators.iter().find(|v| v.len() != rank) {
        return Err(Error::Dimension(format!("generator of length {} in rank {rank}", v.len())));
    }
    let gens: Vec<Vector> = generators.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    let span = lattice::saturated_span(rank, &gens);
    let k = span.len();
    let coords: Vec<Vector> = gens
        .iter()
        .map(|g| lattice::lattice_membership(&span, g).unwrap().expect("generator in its saturated span"))
        .collect();
    let facets = cone_facets(k, &coords);
    if coords.iter().any(|c| facets.iter().all(|f| dot(f, c).is_zero())) {
        return Err(Error::NotPointed("a generator lies in the lineality space".into()));
    }
    let hb = pointed_full_dim(k, &coords, &facets);
    let mut out: Vec<Vector> = hb
        .iter()
        .map(|c| {
            let mut v = vec![BigInt::zero(); rank];
            for (ci, b) in c.iter().zip(&span) {
                for (o, x) in v.iter_mut().zip(b) {
                    *o += ci * x;
                }
            }
            v
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Hilbert basis of a full-dimensional pointed cone given with its facets.
pub(crate) fn pointed_full_dim(dim: usize, gens: &[Vector], facets: &[Vector]) -> Vec<Vector> {
    if dim == 0 {
        return Vec::new();
    }
    let grading: Vector = (0..dim)
        .map(|j| facets.iter().fold(BigInt::zero(), |acc, f| acc + &f[j]))
        .collect();
    let rays = extremal_rays(dim, gens, facets);

    let mut candidates: BTreeSet<(BigInt, Vector)> = BTreeSet::new();
    for r in &rays {
        candidates.insert((dot(&grading, r), r.clone()));
    }
    for subset in (0..rays.len()).combinations(dim) {
        let cols: Vec<Vector> = subset.iter().map(|&i| rays[i].clone()).collect();
        let a = Matrix::from_columns(dim, &cols).expect("generator length");
        for p in parallelepiped_points(&a) {
            candidates.insert((dot(&grading, &p), p));
        }
    }

    let mut basis: Vec<Vector> = Vec::new();
    for (_, x) in candidates {
        let reducible = basis.iter().any(|h| {
            let diff: Vector = x.iter().zip(h).map(|(a, b)| a - b).collect();
            in_cone(facets, &diff)
        });
        if !reducible {
            basis.push(x);
        }
    }
    basis.sort();
    basis
}

/// Primitive generators of the extremal rays: those lying on facets of rank
/// `dim - 1`.
fn extremal_rays(dim: usize, gens: &[Vector], facets: &[Vector]) -> Vec<Vector> {
    let mut rays: Vec<Vector> = gens
        .iter()
        .filter(|g| {
            let tight: Vec<Vector> = facets.iter().filter(|f| dot(f, g).is_zero()).cloned().collect();
            dim == 1 || (!tight.is_empty() && lattice::rank(&Matrix::from_rows(dim, &tight).expect("facet length")) == dim - 1)
        })
        .map(|g| {
            let c = g.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            g.iter().map(|x| x / &c).collect()
        })
        .collect();
    rays.sort();
    rays.dedup();
    rays
}

/// Nonzero lattice points `A λ` with `λ ∈ [0,1)^d`, for square `A`.
/// Empty when `A` is singular.
///
/// Representatives of `Z^d / A Z^d` come from the Smith form; each is moved
/// into the parallelepiped with the adjugate, in integer arithmetic.
fn parallelepiped_points(a: &Matrix<BigInt>) -> Vec<Vector> {
    let det = lattice::determinant(a);
    if det.is_zero() {
        return Vec::new();
    }
    let dim = a.rows();
    let snf = lattice::smith_normal_form(a);
    let diag: Vec<BigInt> = (0..dim).map(|i| snf.d.get(i, i).abs()).collect();
    let u_inv = lattice::unimodular_inverse(&snf.u).expect("snf transform is unimodular");
    // λ = adj(A) x / det
    let adj = adjugate(a);
    let n = det.abs();
    let sign = if det.is_negative() { -BigInt::one() } else { BigInt::one() };
    let ranges: Vec<Vec<BigInt>> = diag
        .iter()
        .map(|d| {
            let mut r = Vec::new();
            let mut i = BigInt::zero();
            while &i < d {
                r.push(i.clone());
                i += 1;
            }
            r
        })
        .collect();
    let mut out = Vec::new();
    for y in ranges.into_iter().multi_cartesian_product() {
        let x = u_inv.mul_vec(&y);
        let m: Vector = adj.mul_vec(&x).iter().map(|v| (v * &sign).mod_floor(&n)).collect();
        let p: Vector = a.mul_vec(&m).iter().map(|v| v / &n).collect();
        if p.iter().any(|x| !x.is_zero()) {
            out.push(p);
        }
    }
    out
}

fn adjugate(a: &Matrix<BigInt>) -> Matrix<BigInt> {
    let n = a.rows();
    if n == 1 {
        return Matrix::identity(1);
    }
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = lattice::determinant(&a.select_rows(&rows).select_columns(&cols));
            out.set(i, j, if (i + j) % 2 == 0 { minor } else { -minor });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::ints;

    #[test]
    fn numerical_semigroup() {
        assert_eq!(hilbert_basis(1, &[ints(&[2]), ints(&[3])]).unwrap(), vec![ints(&[1])]);
    }

    #[test]
    fn two_dimensional_cone() {
        let hb = hilbert_basis(2, &[ints(&[1, 0]), ints(&[1, 2])]).unwrap();
        assert_eq!(hb, vec![ints(&[1, 0]), ints(&[1, 1]), ints(&[1, 2])]);
    }

    #[test]
    fn already_a_basis() {
        let hb = hilbert_basis(2, &[ints(&[0, 1]), ints(&[1, 0])]).unwrap();
        assert_eq!(hb, vec![ints(&[0, 1]), ints(&[1, 0])]);
    }

    #[test]
    fn non_full_dimensional_input() {
        let hb = hilbert_basis(3, &[ints(&[2, 2, 0]), ints(&[0, 0, 3])]).unwrap();
        assert_eq!(hb, vec![ints(&[0, 0, 1]), ints(&[1, 1, 0])]);
    }

    #[test]
    fn rejects_lines() {
        assert!(matches!(
            hilbert_basis(1, &[ints(&[1]), ints(&[-1])]),
            Err(Error::NotPointed(_))
        ));
    }

    #[test]
    fn simplicial_cone_of_index_two() {
        // det = 2, so the parallelepiped holds exactly (a + b + c) / 2
        let hb = hilbert_basis(3, &[ints(&[1, 0, 1]), ints(&[0, 1, 1]), ints(&[1, 1, 4])]).unwrap();
        assert!(hb.contains(&ints(&[1, 1, 3])));
        assert_eq!(hb.len(), 4);
    }
}
