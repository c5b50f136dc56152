//! Faces, prime ideals and sharp localizations.
//!
//! A face is recorded by the indices of the generators it contains; the
//! complementary generator indices describe the prime ideal `P \ F`. The
//! whole monoid is a face (its prime is empty, the generic point) and, for
//! sharp monoids, so is `{0}` (its prime is the maximal ideal).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{AffineMonoid, MonoidHom, Vector};
use crate::error::{Error, Result};
use crate::fm::{feasible, Constraint};
use crate::lattice::dot;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    indices: Vec<usize>,
}

impl Ord for Face {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.indices.len().cmp(&other.indices.len()).then_with(|| self.indices.cmp(&other.indices))
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Face {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Face { indices }
    }

    pub fn whole(m: &AffineMonoid) -> Self {
        Face { indices: (0..m.generators().len()).collect() }
    }

    /// The face whose prime ideal is generated by `prime`.
    pub fn from_prime(m: &AffineMonoid, prime: &[usize]) -> Self {
        Face { indices: (0..m.generators().len()).filter(|i| !prime.contains(i)).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &Face) -> bool {
        self.indices.iter().all(|i| other.contains_index(*i))
    }

    /// Generator indices of the prime ideal `P \ F`.
    pub fn prime(&self, m: &AffineMonoid) -> Vec<usize> {
        (0..m.generators().len()).filter(|i| !self.contains_index(*i)).collect()
    }

    pub fn generators(&self, m: &AffineMonoid) -> Vec<Vector> {
        self.indices.iter().map(|&i| m.generators()[i].clone()).collect()
    }

    pub fn intersect(&self, other: &Face) -> Face {
        Face { indices: self.indices.iter().copied().filter(|i| other.contains_index(*i)).collect() }
    }
}

/// All faces, smallest first (by size, then lexicographically).
pub fn faces(p: &AffineMonoid) -> Vec<Face> {
    let zero_sets: Vec<Face> = p
        .facets()
        .iter()
        .map(|f| {
            Face::new(
                (0..p.generators().len())
                    .filter(|&i| dot(f, &p.generators()[i]).is_zero())
                    .collect(),
            )
        })
        .collect();
    let mut found: BTreeSet<Face> = BTreeSet::new();
    let mut stack = vec![Face::whole(p)];
    while let Some(face) = stack.pop() {
        if !found.insert(face.clone()) {
            continue;
        }
        for z in &zero_sets {
            let next = face.intersect(z);
            if !found.contains(&next) {
                stack.push(next);
            }
        }
    }
    found.into_iter().collect()
}

/// Exact supporting-functional test: some rational `φ` vanishes on the
/// selected generators and is at least one on all the others.
pub fn is_face(p: &AffineMonoid, face: &Face) -> bool {
    if face.indices.iter().any(|&i| i >= p.generators().len()) {
        return false;
    }
    let q = |x: &BigInt| <BigRational as Scalar>::from_bigint(x);
    let constraints: Vec<Constraint<BigRational>> = p
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let coeffs: Vec<BigRational> = g.iter().map(q).collect();
            if face.contains_index(i) {
                Constraint::eq(coeffs, BigRational::zero())
            } else {
                Constraint::ge(coeffs, BigRational::one())
            }
        })
        .collect();
    feasible(p.rank(), &constraints)
}

/// Integer functional, nonnegative on `P`, whose zero set in `P` is the face.
pub fn face_functional(p: &AffineMonoid, face: &Face) -> Vector {
    let gens = face.generators(p);
    let mut out = vec![BigInt::zero(); p.rank()];
    for f in p.facets() {
        if gens.iter().all(|g| dot(f, g).is_zero()) {
            for (o, x) in out.iter_mut().zip(f) {
                *o += x;
            }
        }
    }
    out
}

/// Smallest face containing the given cone elements.
pub fn face_hull(p: &AffineMonoid, vectors: &[Vector]) -> Face {
    let containing: Vec<&Vector> = p
        .facets()
        .iter()
        .filter(|f| vectors.iter().all(|v| dot(f, v).is_zero()))
        .collect();
    Face::new(
        (0..p.generators().len())
            .filter(|&i| containing.iter().all(|f| dot(f, &p.generators()[i]).is_zero()))
            .collect(),
    )
}

/// `h^{-1}(F)` for a face `F` of the target.
pub fn preimage_face(h: &MonoidHom, face: &Face) -> Face {
    let phi = face_functional(h.target(), face);
    Face::new(
        (0..h.source().generators().len())
            .filter(|&i| dot(&phi, &h.apply(&h.source().generators()[i])).is_zero())
            .collect(),
    )
}

/// `P -> P̄_F = P_F / P_F*` together with the face it inverts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Localization {
    pub face: Face,
    pub monoid: AffineMonoid,
    pub hom: MonoidHom,
}

/// Sharp localization of `p` along the face `face`.
pub fn sharp_localize(p: &AffineMonoid, face: &Face) -> Result<Localization> {
    if !is_face(p, face) {
        return Err(Error::NotAFace(format!("{:?} in a monoid with {} generators", face.indices, p.generators().len())));
    }
    let mut gens: Vec<Vector> = p.generators().to_vec();
    for g in face.generators(p) {
        gens.push(g.iter().map(|x| -x).collect());
    }
    // localizations of saturated monoids are saturated
    let localized = if p.is_saturated() {
        AffineMonoid::from_canonical_saturated(p.rank(), gens)
    } else {
        AffineMonoid::from_canonical(p.rank(), gens)
    };
    let (sharp, quotient) = localized.sharpen();
    let hom = MonoidHom::new_unchecked(p.clone(), sharp.clone(), quotient.matrix().clone());
    Ok(Localization { face: face.clone(), monoid: sharp, hom })
}
