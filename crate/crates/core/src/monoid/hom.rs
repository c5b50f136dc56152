use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{face, AffineMonoid, Vector};
use crate::error::{Error, Result};
use crate::lattice::{self, Matrix};
use crate::linalg;
use crate::IntMatrix;

/// Homomorphism of fine monoids, given by its (unique) extension to the
/// canonical ambient lattices: a `target.rank() x source.rank()` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonoidHom {
    source: AffineMonoid,
    target: AffineMonoid,
    matrix: IntMatrix,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HomClass {
    pub is_local: bool,
    pub is_iso: bool,
    pub is_face_localization: bool,
}

impl MonoidHom {
    pub fn new(matrix: IntMatrix, source: AffineMonoid, target: AffineMonoid) -> Result<Self> {
        if matrix.shape() != (target.rank(), source.rank()) {
            return Err(Error::Dimension(format!(
                "hom matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        for (i, g) in source.generators().iter().enumerate() {
            let image = matrix.mul_vec(g);
            if !target.contains(&image) {
                return Err(Error::InvalidHom(format!(
                    "generator {i} maps to {image:?}, outside the target monoid"
                )));
            }
        }
        Ok(MonoidHom { source, target, matrix })
    }

    pub(crate) fn new_unchecked(source: AffineMonoid, target: AffineMonoid, matrix: IntMatrix) -> Self {
        debug_assert_eq!(matrix.shape(), (target.rank(), source.rank()));
        MonoidHom { source, target, matrix }
    }

    pub fn identity(m: &AffineMonoid) -> Self {
        MonoidHom { source: m.clone(), target: m.clone(), matrix: Matrix::identity(m.rank()) }
    }

    pub fn source(&self) -> &AffineMonoid {
        &self.source
    }

    pub fn target(&self) -> &AffineMonoid {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[BigInt]) -> Vector {
        self.matrix.mul_vec(v)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &MonoidHom) -> Result<MonoidHom> {
        if first.target != self.source {
            return Err(Error::Dimension("composing homs with mismatched monoids".into()));
        }
        Ok(MonoidHom {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &first.matrix,
        })
    }

    /// Inverse hom, when `self` is an isomorphism of monoids.
    pub fn inverse(&self) -> Option<MonoidHom> {
        let inv = lattice::unimodular_inverse(&self.matrix)?;
        let ok = self.target.generators().iter().all(|g| self.source.contains(&inv.mul_vec(g)));
        ok.then(|| MonoidHom { source: self.target.clone(), target: self.source.clone(), matrix: inv })
    }

    pub fn is_iso(&self) -> bool {
        self.inverse().is_some()
    }

    /// Non-units map to non-units.
    pub fn is_local(&self) -> bool {
        (0..self.source.generators().len())
            .filter(|&i| !self.source.is_unit_generator(i))
            .all(|i| !self.target.is_unit_vector(&self.apply(&self.source.generators()[i])))
    }

    /// Whether `self` is `P -> P̄_F` for some face `F`, up to an isomorphism
    /// of the target.
    pub fn is_face_localization(&self) -> bool {
        if !self.target.is_sharp() {
            return false;
        }
        let inverted = face::Face::new(
            (0..self.source.generators().len())
                .filter(|&i| self.target.is_unit_vector(&self.apply(&self.source.generators()[i])))
                .collect(),
        );
        let Ok(loc) = face::sharp_localize(&self.source, &inverted) else {
            return false;
        };
        let Some(x) = lattice::factor_through(&self.matrix, loc.hom.matrix()) else {
            return false;
        };
        MonoidHom { source: loc.monoid, target: self.target.clone(), matrix: x }.is_iso()
    }

    pub fn classify(&self) -> HomClass {
        HomClass {
            is_local: self.is_local(),
            is_iso: self.is_iso(),
            is_face_localization: self.is_face_localization(),
        }
    }
}

/// Checks that `matrix` maps `p` into `q` and classifies the result.
pub fn validate_hom(matrix: IntMatrix, p: &AffineMonoid, q: &AffineMonoid) -> Result<(MonoidHom, HomClass)> {
    let h = MonoidHom::new(matrix, p.clone(), q.clone())?;
    let class = h.classify();
    Ok((h, class))
}

/// All automorphisms of a sharp saturated monoid, identity first.
///
/// An automorphism permutes the Hilbert basis, so it is determined by the
/// images of a fixed independent subset of it.
pub fn automorphisms(p: &AffineMonoid) -> Result<Vec<IntMatrix>> {
    if !p.is_sharp() {
        return Err(Error::NotSharp("automorphisms are enumerated for sharp monoids".into()));
    }
    if !p.is_saturated() {
        return Err(Error::NotSaturated("automorphisms are enumerated for saturated monoids".into()));
    }
    let d = p.rank();
    let hb = super::hilbert_basis(d, p.generators())?;
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..hb.len() {
        let mut trial: Vec<Vector> = chosen.iter().map(|&j| hb[j].clone()).collect();
        trial.push(hb[i].clone());
        if lattice::hermite_basis(d, &trial).len() == trial.len() {
            chosen.push(i);
        }
        if chosen.len() == d {
            break;
        }
    }
    let s_t: Matrix<BigRational> = linalg::to_field(&Matrix::from_rows(d, &chosen.iter().map(|&j| hb[j].clone()).collect::<Vec<_>>())?);
    let hb_set: std::collections::BTreeSet<&Vector> = hb.iter().collect();

    let mut out: Vec<IntMatrix> = Vec::new();
    for images in (0..hb.len()).permutations(d) {
        // x * s = t, row by row: s^T x_i^T = t_i^T
        let mut rows: Vec<Vector> = Vec::with_capacity(d);
        let mut integral = true;
        for i in 0..d {
            let rhs: Vec<BigRational> =
                images.iter().map(|&j| BigRational::from_integer(hb[j][i].clone())).collect();
            let Some(sol) = linalg::solve(&s_t, &rhs) else {
                integral = false;
                break;
            };
            if sol.iter().any(|x| !x.denom().is_one()) {
                integral = false;
                break;
            }
            rows.push(sol.into_iter().map(|x| x.to_integer()).collect());
        }
        if !integral {
            continue;
        }
        let x = Matrix::from_rows(d, &rows)?;
        let mapped: std::collections::BTreeSet<Vector> = hb.iter().map(|h| x.mul_vec(h)).collect();
        if mapped.len() == hb.len() && mapped.iter().all(|m| hb_set.contains(m)) && !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort_by(|a, b| b.is_identity().cmp(&a.is_identity()).then_with(|| a.cmp(b)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{ints, make_monoid};

    fn m(rows: &[&[i64]], cols: usize) -> IntMatrix {
        Matrix::from_rows(cols, &rows.iter().map(|r| ints(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_is_iso() {
        let n2 = AffineMonoid::free(2);
        let (_, c) = validate_hom(Matrix::identity(2), &n2, &n2).unwrap();
        assert!(c.is_iso && c.is_local && c.is_face_localization);
    }

    #[test]
    fn doubling_is_local_not_iso() {
        let n = AffineMonoid::free(1);
        let (_, c) = validate_hom(m(&[&[2]], 1), &n, &n).unwrap();
        assert!(c.is_local && !c.is_iso && !c.is_face_localization);
    }

    #[test]
    fn negative_image_rejected() {
        let n2 = AffineMonoid::free(2);
        let n = AffineMonoid::free(1);
        // e1 = (1,0) is generator index 1; send it to -1
        assert!(matches!(validate_hom(m(&[&[0, -1]], 2), &n2, &n), Err(Error::InvalidHom(_))));
        assert!(matches!(validate_hom(m(&[&[1]], 1), &n2, &n), Err(Error::Dimension(_))));
    }

    #[test]
    fn projection_is_face_localization() {
        let n2 = AffineMonoid::free(2);
        let n = AffineMonoid::free(1);
        let (_, c) = validate_hom(m(&[&[1, 0]], 2), &n2, &n).unwrap();
        assert!(c.is_face_localization && !c.is_local && !c.is_iso);
    }

    #[test]
    fn automorphisms_of_n2_and_cone() {
        let a = automorphisms(&AffineMonoid::free(2)).unwrap();
        assert_eq!(a.len(), 2);
        assert!(a[0].is_identity());
        let p = make_monoid(2, &[ints(&[1, 0]), ints(&[1, 1]), ints(&[1, 2])]).unwrap();
        assert_eq!(automorphisms(&p).unwrap().len(), 2);
        assert_eq!(automorphisms(&AffineMonoid::free(3)).unwrap().len(), 6);
        assert_eq!(automorphisms(&AffineMonoid::zero()).unwrap().len(), 1);
    }
}
