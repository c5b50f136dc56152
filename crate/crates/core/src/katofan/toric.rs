//! Kato fans of toric fans.
//!
//! A cone `σ` in `N = Z^n` contributes the sharp monoid `σ^∨ ∩ M` modulo its
//! units, which is the dual of `σ` inside the lattice `N_σ` it spans. Charts
//! come from maximal cones and are glued along their common faces.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Gluing, KatoFan};
use crate::error::{Error, Result};
use crate::fm::{feasible, Constraint};
use crate::lattice::{self, dot, Matrix};
use crate::monoid::{cone_facets, faces, hilbert_basis, make_monoid_with_embedding, sharp_localize, AffineMonoid, Face, Vector};
use crate::IntMatrix;

/// A cone named by its sorted primitive extremal rays.
type Cone = Vec<Vector>;

fn primitive(v: &[BigInt]) -> Vector {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    v.iter().map(|x| x / &g).collect()
}

/// Extremal rays and all faces of the cone spanned by `rays`.
fn cone_faces(dim: usize, rays: &[Vector]) -> Result<(Cone, Vec<Cone>)> {
    let mut rays: Vec<Vector> =
        rays.iter().filter(|r| r.iter().any(|x| !x.is_zero())).map(|r| primitive(r)).collect();
    rays.sort();
    rays.dedup();
    let (m, emb) = make_monoid_with_embedding(dim, &rays)?;
    if !m.is_sharp() {
        return Err(Error::InvalidFan("cone is not strictly convex".into()));
    }
    let fs = faces(&m);
    let extremal: Vec<usize> = fs.iter().filter(|f| f.len() == 1).map(|f| f.indices()[0]).collect();
    let ambient = |i: usize| emb.to_ambient(&m.generators()[i]);
    let mut all: Vec<Cone> = fs
        .iter()
        .map(|f| {
            let mut c: Cone = extremal.iter().filter(|i| f.contains_index(**i)).map(|&i| ambient(i)).collect();
            c.sort();
            c
        })
        .collect();
    all.sort();
    let mut top: Cone = extremal.iter().map(|&i| ambient(i)).collect();
    top.sort();
    Ok((top, all))
}

/// All cones of the fan generated by the input cones (closed under faces),
/// sorted by dimension and then lexicographically. Fails when the input is
/// not a fan.
pub fn toric_cones(dim: usize, cones: &[Vec<Vector>]) -> Result<Vec<Vec<Vector>>> {
    if let Some(r) = cones.iter().flatten().find(|r| r.len() != dim) {
        return Err(Error::Dimension(format!("ray of length {} in dimension {dim}", r.len())));
    }
    let mut all: BTreeSet<Cone> = BTreeSet::new();
    let mut tops: Vec<(Cone, BTreeSet<Cone>)> = Vec::new();
    for c in cones {
        let (top, fs) = cone_faces(dim, c)?;
        all.extend(fs.iter().cloned());
        tops.push((top, fs.into_iter().collect()));
    }
    if cones.is_empty() {
        all.insert(Vec::new());
    }
    for (a, (sa, fa)) in tops.iter().enumerate() {
        for (sb, fb) in &tops[a + 1..] {
            check_meet(dim, sa, fa, sb, fb)?;
        }
    }
    let mut out: Vec<Cone> = all.into_iter().collect();
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Ok(out)
}

/// `σ ∩ τ` must be the cone on the common rays, and a face of both. Checked
/// exactly by a separating functional: zero on the common rays, positive on
/// the other rays of `σ`, negative on the other rays of `τ`.
fn check_meet(dim: usize, sa: &Cone, fa: &BTreeSet<Cone>, sb: &Cone, fb: &BTreeSet<Cone>) -> Result<()> {
    let common: Cone = sa.iter().filter(|r| sb.contains(r)).cloned().collect();
    if !fa.contains(&common) || !fb.contains(&common) {
        return Err(Error::InvalidFan("two cones share rays that do not span a common face".into()));
    }
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    let mut cs: Vec<Constraint<BigRational>> = Vec::new();
    for r in sa {
        let coeffs: Vec<BigRational> = r.iter().map(q).collect();
        if common.contains(r) {
            cs.push(Constraint::eq(coeffs, BigRational::zero()));
        } else {
            cs.push(Constraint::ge(coeffs, BigRational::one()));
        }
    }
    for r in sb.iter().filter(|r| !common.contains(r)) {
        cs.push(Constraint::ge(r.iter().map(|x| -q(x)).collect(), BigRational::one()));
    }
    if !feasible(dim, &cs) {
        return Err(Error::InvalidFan("two cones overlap outside a common face".into()));
    }
    Ok(())
}

/// Sharpened dual monoid of a cone, in coordinates dual to a basis of the
/// lattice the cone spans; returns the monoid and that basis.
fn dual_chart(dim: usize, cone: &Cone) -> (AffineMonoid, Vec<Vector>) {
    let basis = lattice::saturated_span(dim, cone);
    let k = basis.len();
    let coords: Vec<Vector> = cone
        .iter()
        .map(|r| lattice::lattice_membership(&basis, r).unwrap().expect("ray lies in its span"))
        .collect();
    let normals = cone_facets(k, &coords);
    let hb = hilbert_basis(k, &normals).expect("dual of a full-dimensional pointed cone is pointed");
    (AffineMonoid::from_canonical_saturated(k, hb), basis)
}

/// Face of the dual chart of `sigma` that corresponds to its face `tau`.
fn dual_face(chart: &AffineMonoid, basis: &[Vector], tau: &Cone) -> Face {
    let coords: Vec<Vector> = tau
        .iter()
        .map(|r| lattice::lattice_membership(basis, r).unwrap().expect("face ray lies in the span"))
        .collect();
    Face::new(
        (0..chart.generators().len())
            .filter(|&i| coords.iter().all(|c| dot(&chart.generators()[i], c).is_zero()))
            .collect(),
    )
}

/// `C`: restriction of functionals from `N_sigma` to `N_gamma` in dual coordinates.
fn restriction(sigma_basis: &[Vector], gamma_basis: &[Vector]) -> IntMatrix {
    let rows: Vec<Vector> = gamma_basis
        .iter()
        .map(|b| lattice::lattice_membership(sigma_basis, b).unwrap().expect("sub-lattice"))
        .collect();
    Matrix::from_rows(sigma_basis.len(), &rows).expect("coordinate length")
}

/// Kato fan of a toric fan given by the ray generators of its cones.
pub fn from_toric_fan(dim: usize, cones: &[Vec<Vector>]) -> Result<KatoFan> {
    let all = toric_cones(dim, cones)?;
    let maximal: Vec<&Cone> = all
        .iter()
        .filter(|c| !all.iter().any(|d| d.len() > c.len() && c.iter().all(|r| d.contains(r))))
        .collect();
    let charts: Vec<(AffineMonoid, Vec<Vector>)> = maximal.iter().map(|c| dual_chart(dim, c)).collect();

    let mut gluings = Vec::new();
    for a in 0..maximal.len() {
        for b in a + 1..maximal.len() {
            let gamma: Cone = maximal[a].iter().filter(|r| maximal[b].contains(r)).cloned().collect();
            let (_, gamma_basis) = dual_chart(dim, &gamma);
            let fa = dual_face(&charts[a].0, &charts[a].1, &gamma);
            let fb = dual_face(&charts[b].0, &charts[b].1, &gamma);
            let la = sharp_localize(&charts[a].0, &fa)?;
            let lb = sharp_localize(&charts[b].0, &fb)?;
            let ea = lattice::factor_through(&restriction(&charts[a].1, &gamma_basis), la.hom.matrix())
                .ok_or_else(|| Error::InvalidFan("restriction does not factor through the localization".into()))?;
            let eb = lattice::factor_through(&restriction(&charts[b].1, &gamma_basis), lb.hom.matrix())
                .ok_or_else(|| Error::InvalidFan("restriction does not factor through the localization".into()))?;
            let eb_inv = lattice::unimodular_inverse(&eb)
                .ok_or_else(|| Error::InvalidFan("localization is not the dual of the common face".into()))?;
            gluings.push(Gluing { i: a, face_i: fa, j: b, face_j: fb, iso: &eb_inv * &ea });
        }
    }
    let fan = KatoFan::new(charts.into_iter().map(|c| c.0).collect(), gluings)?;
    if fan.points().len() != all.len() {
        return Err(Error::InvalidFan(format!(
            "{} fan points for {} cones",
            fan.points().len(),
            all.len()
        )));
    }
    Ok(fan)
}
