//! Fine monoids in canonical lattice embeddings.
//!
//! An [`AffineMonoid`] of rank `d` is the submonoid of `Z^d` generated by a
//! finite list of vectors whose group is all of `Z^d`. Constructors
//! re-embed arbitrary generator lists so that this holds, which makes
//! `P^gp = Z^d` and lets homomorphisms be plain integer matrices.

mod face;
mod hilbert;
mod hom;
mod pushout;

use std::collections::HashSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{self, dot, Matrix};

pub use face::{face_functional, face_hull, faces, is_face, preimage_face, sharp_localize, Face, Localization};
pub use hilbert::hilbert_basis;
pub use hom::{automorphisms, validate_hom, HomClass, MonoidHom};
pub use pushout::{fs_pushout, Pushout};

/// Integer vector in a canonical ambient lattice.
pub type Vector = Vec<BigInt>;

#[cfg(test)]
pub(crate) fn ints(v: &[i64]) -> Vector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMonoid {
    rank: usize,
    generators: Vec<Vector>,
    /// Primitive inward facet normals of the generated cone.
    facets: Vec<Vector>,
    sharp: bool,
    saturated: bool,
}

/// Coordinates of a canonical monoid inside the lattice it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    ambient_rank: usize,
    /// Basis of the generated group, as rows in the ambient lattice.
    pub basis: Vec<Vector>,
}

impl Embedding {
    /// Canonical coordinates of an ambient vector, if it lies in the group.
    pub fn coords(&self, v: &[BigInt]) -> Option<Vector> {
        lattice::lattice_membership(&self.basis, v).ok().flatten()
    }

    pub fn to_ambient(&self, c: &[BigInt]) -> Vector {
        let mut out = vec![BigInt::zero(); self.ambient_rank];
        for (ci, b) in c.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += ci * x;
            }
        }
        out
    }
}

/// `make_monoid`: canonical form of the monoid generated by `raw` in `Z^rank`.
pub fn make_monoid(rank: usize, raw: &[Vector]) -> Result<AffineMonoid> {
    Ok(make_monoid_with_embedding(rank, raw)?.0)
}

pub fn make_monoid_with_embedding(rank: usize, raw: &[Vector]) -> Result<(AffineMonoid, Embedding)> {
    if let Some(v) = raw.iter().find(|v| v.len() != rank) {
        return Err(Error::Dimension(format!("generator of length {} in rank {rank}", v.len())));
    }
    let basis = lattice::hermite_basis(rank, raw);
    let emb = Embedding { ambient_rank: rank, basis };
    let gens: Vec<Vector> = raw
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .map(|v| emb.coords(v).expect("generator lies in its own group"))
        .collect();
    Ok((AffineMonoid::from_canonical(emb.basis.len(), gens), emb))
}

pub(crate) fn in_cone(facets: &[Vector], v: &[BigInt]) -> bool {
    facets.iter().all(|f| !dot(f, v).is_negative())
}

/// Inward facet normals of the full-dimensional cone spanned by `gens`.
pub(crate) fn cone_facets(dim: usize, gens: &[Vector]) -> Vec<Vector> {
    if dim == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vector> = Vec::new();
    for subset in (0..gens.len()).combinations(dim - 1) {
        let rows: Vec<Vector> = subset.iter().map(|&i| gens[i].clone()).collect();
        let m = Matrix::from_rows(dim, &rows).expect("generator length");
        let ker = lattice::kernel_basis(&m);
        if ker.len() != 1 {
            continue;
        }
        let n = &ker[0];
        let (mut pos, mut neg) = (false, false);
        for g in gens {
            let s = dot(n, g);
            pos |= s.is_positive();
            neg |= s.is_negative();
        }
        if pos == neg {
            continue;
        }
        let normal = if neg { n.iter().map(|x| -x).collect() } else { n.clone() };
        if !out.contains(&normal) {
            out.push(normal);
        }
    }
    out.sort();
    out
}

impl AffineMonoid {
    /// Builds from generators whose group is already all of `Z^rank`.
    pub(crate) fn from_canonical(rank: usize, gens: Vec<Vector>) -> Self {
        let mut m = AffineMonoid::from_parts(rank, gens, false);
        m.saturated = m.compute_saturated();
        m
    }

    /// As [`from_canonical`](Self::from_canonical), for generators known to
    /// generate a saturated monoid (Hilbert bases, free monoids).
    pub(crate) fn from_canonical_saturated(rank: usize, gens: Vec<Vector>) -> Self {
        AffineMonoid::from_parts(rank, gens, true)
    }

    /// Saturation of the monoid generated by canonical generators, without
    /// first deciding whether it is already saturated.
    pub(crate) fn saturation_of(rank: usize, gens: Vec<Vector>) -> Self {
        AffineMonoid::from_parts(rank, gens, false).saturate_unchecked()
    }

    fn from_parts(rank: usize, gens: Vec<Vector>, saturated: bool) -> Self {
        let mut gens: Vec<Vector> =
            gens.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
        gens.sort();
        gens.dedup();
        debug_assert_eq!(lattice::hermite_basis(rank, &gens).len(), rank);
        let facets = cone_facets(rank, &gens);
        let sharp = gens.iter().all(|g| facets.iter().any(|f| !dot(f, g).is_zero()));
        AffineMonoid { rank, generators: gens, facets, sharp, saturated }
    }

    pub fn zero() -> Self {
        AffineMonoid::from_canonical_saturated(0, Vec::new())
    }

    /// `N^k` with the standard basis.
    pub fn free(k: usize) -> Self {
        let gens = (0..k)
            .map(|i| (0..k).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        AffineMonoid::from_canonical_saturated(k, gens)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn facets(&self) -> &[Vector] {
        &self.facets
    }

    pub fn is_sharp(&self) -> bool {
        self.sharp
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn is_unit_generator(&self, i: usize) -> bool {
        self.facets.iter().all(|f| dot(f, &self.generators[i]).is_zero())
    }

    pub fn unit_generator_indices(&self) -> Vec<usize> {
        (0..self.generators.len()).filter(|&i| self.is_unit_generator(i)).collect()
    }

    /// Whether `v` lies in the real cone spanned by the generators.
    pub fn cone_contains(&self, v: &[BigInt]) -> bool {
        v.len() == self.rank && in_cone(&self.facets, v)
    }

    /// Whether `v` lies in the lineality space of the cone.
    pub fn is_unit_vector(&self, v: &[BigInt]) -> bool {
        self.facets.iter().all(|f| dot(f, v).is_zero())
    }

    /// Monoid membership.
    ///
    /// Saturated monoids only need the cone test (the group is `Z^d`);
    /// otherwise a bounded search over generator multiplicities decides.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        if !self.cone_contains(v) {
            return false;
        }
        if self.saturated {
            return true;
        }
        self.search_member(v)
    }

    fn search_member(&self, v: &[BigInt]) -> bool {
        let units: Vec<Vector> = self
            .unit_generator_indices()
            .into_iter()
            .map(|i| self.generators[i].clone())
            .collect();
        let others: Vec<Vector> = (0..self.generators.len())
            .filter(|&i| !self.is_unit_generator(i))
            .map(|i| self.generators[i].clone())
            .collect();
        let unit_basis = lattice::hermite_basis(self.rank, &units);
        let units_saturated = unit_basis == lattice::saturated_span(self.rank, &units);
        let pi = lattice::quotient_projection(self.rank, &units);
        let images: Vec<Vector> = others.iter().map(|h| pi.mul_vec(h)).collect();
        let target = pi.mul_vec(v);
        let qdim = pi.rows();
        let qfacets = cone_facets(qdim, &images);
        let grading: Vector = (0..qdim)
            .map(|j| qfacets.iter().fold(BigInt::zero(), |acc, f| acc + &f[j]))
            .collect();
        let weights: Vec<BigInt> = images.iter().map(|a| dot(&grading, a)).collect();

        let mut search = MemberSearch {
            images: &images,
            others: &others,
            weights: &weights,
            grading: &grading,
            qfacets: &qfacets,
            unit_basis: &unit_basis,
            units_saturated,
            v,
            failed: HashSet::new(),
        };
        let mut counts = vec![BigInt::zero(); images.len()];
        search.run(0, target, &mut counts)
    }

    /// Whether every Hilbert basis element of `cone ∩ Z^d` lies in the monoid.
    fn compute_saturated(&self) -> bool {
        let units: Vec<Vector> = self
            .unit_generator_indices()
            .into_iter()
            .map(|i| self.generators[i].clone())
            .collect();
        if lattice::hermite_basis(self.rank, &units) != lattice::saturated_span(self.rank, &units) {
            return false;
        }
        let (hb, lift) = self.sharp_hilbert_lifts();
        let gens: HashSet<&Vector> = self.generators.iter().collect();
        hb.iter().zip(lift).all(|(_, l)| gens.contains(&l) || self.search_member(&l))
    }

    /// Hilbert basis of the sharp quotient cone, with lifts to `Z^d`.
    fn sharp_hilbert_lifts(&self) -> (Vec<Vector>, Vec<Vector>) {
        let units: Vec<Vector> = self
            .unit_generator_indices()
            .into_iter()
            .map(|i| self.generators[i].clone())
            .collect();
        let pi = lattice::quotient_projection(self.rank, &units);
        let images: Vec<Vector> = (0..self.generators.len())
            .filter(|&i| !self.is_unit_generator(i))
            .map(|i| pi.mul_vec(&self.generators[i]))
            .collect();
        let qfacets = cone_facets(pi.rows(), &images);
        let hb = hilbert::pointed_full_dim(pi.rows(), &images, &qfacets);
        let section = lattice::right_inverse(&pi).expect("quotient projection is surjective");
        let lifts = hb.iter().map(|h| section.mul_vec(h)).collect();
        (hb, lifts)
    }

    /// Lattice basis of the unit group `P*`.
    pub fn unit_group(&self) -> Vec<Vector> {
        let units: Vec<Vector> = self
            .unit_generator_indices()
            .into_iter()
            .map(|i| self.generators[i].clone())
            .collect();
        lattice::hermite_basis(self.rank, &units)
    }

    /// `P^sat = cone(P) ∩ Z^d`: Hilbert basis of the sharp part, lifted,
    /// plus plus-minus a basis of the saturated unit lattice.
    pub fn saturate(&self) -> AffineMonoid {
        if self.saturated {
            return self.clone();
        }
        self.saturate_unchecked()
    }

    fn saturate_unchecked(&self) -> AffineMonoid {
        let units: Vec<Vector> = self
            .unit_generator_indices()
            .into_iter()
            .map(|i| self.generators[i].clone())
            .collect();
        let (_, mut gens) = self.sharp_hilbert_lifts();
        for b in lattice::saturated_span(self.rank, &units) {
            gens.push(b.iter().map(|x| -x).collect());
            gens.push(b);
        }
        AffineMonoid::from_canonical_saturated(self.rank, gens)
    }

    /// `P -> P/P*` in canonical coordinates.
    ///
    /// The quotient is taken by the saturation of the unit lattice, so the
    /// result is torsion free; for fs monoids this is exactly `P/P*`.
    pub fn sharpen(&self) -> (AffineMonoid, MonoidHom) {
        let units: Vec<Vector> = self
            .unit_generator_indices()
            .into_iter()
            .map(|i| self.generators[i].clone())
            .collect();
        let pi = lattice::quotient_projection(self.rank, &units);
        let images: Vec<Vector> = self.generators.iter().map(|g| pi.mul_vec(g)).collect();
        let target = if self.saturated {
            AffineMonoid::from_canonical_saturated(pi.rows(), images)
        } else {
            AffineMonoid::from_canonical(pi.rows(), images)
        };
        let hom = MonoidHom::new_unchecked(self.clone(), target.clone(), pi);
        (target, hom)
    }

    pub fn grading(&self) -> Option<Vector> {
        if !self.sharp {
            return None;
        }
        Some(
            (0..self.rank)
                .map(|j| self.facets.iter().fold(BigInt::zero(), |acc, f| acc + &f[j]))
                .collect(),
        )
    }
}

struct MemberSearch<'a> {
    images: &'a [Vector],
    others: &'a [Vector],
    weights: &'a [BigInt],
    grading: &'a Vector,
    qfacets: &'a [Vector],
    unit_basis: &'a [Vector],
    units_saturated: bool,
    v: &'a [BigInt],
    failed: HashSet<(usize, Vector)>,
}

impl MemberSearch<'_> {
    fn run(&mut self, j: usize, rem: Vector, counts: &mut Vec<BigInt>) -> bool {
        if rem.iter().all(Zero::is_zero) && self.residual_is_unit(counts) {
            return true;
        }
        if j == self.images.len() || !in_cone(self.qfacets, &rem) {
            return false;
        }
        let key = (j, rem.clone());
        if self.units_saturated && self.failed.contains(&key) {
            return false;
        }
        let budget = dot(self.grading, &rem);
        let max_k = budget.div_floor(&self.weights[j]);
        let mut k = BigInt::zero();
        let mut cur = rem;
        while k <= max_k {
            counts[j] = k.clone();
            if self.run(j + 1, cur.clone(), counts) {
                return true;
            }
            for (c, a) in cur.iter_mut().zip(&self.images[j]) {
                *c -= a;
            }
            k += 1;
        }
        counts[j] = BigInt::zero();
        if self.units_saturated {
            self.failed.insert(key);
        }
        false
    }

    fn residual_is_unit(&self, counts: &[BigInt]) -> bool {
        if self.units_saturated {
            return true;
        }
        let mut r: Vector = self.v.to_vec();
        for (k, h) in counts.iter().zip(self.others) {
            for (x, y) in r.iter_mut().zip(h) {
                *x -= k * y;
            }
        }
        matches!(lattice::lattice_membership(self.unit_basis, &r), Ok(Some(_)))
    }
}
