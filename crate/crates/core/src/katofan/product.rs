//! Fiber products of Kato fans over an affine base.
//!
//! Over `H = Spec S`, the product of charts `Spec P` and `Spec Q` is the
//! spectrum of the sharpened fs pushout `P ⊕_S Q`. Charts are glued by
//! functoriality from the gluings of the factors (and identities).

use super::{Gluing, KatoFan, KatoFanMorphism};
use crate::error::{Error, Result};
use crate::lattice::{self, Matrix};
use crate::monoid::{face_hull, fs_pushout, sharp_localize, AffineMonoid, Face, Vector};
use crate::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberProduct {
    pub fan: KatoFan,
    pub first: KatoFanMorphism,
    pub second: KatoFanMorphism,
    /// `(chart of F, chart of G)` for each product chart.
    pub pairs: Vec<(usize, usize)>,
}

struct Chart {
    monoid: AffineMonoid,
    p1: IntMatrix,
    p2: IntMatrix,
}

/// A gluing of one factor, or the identity of a chart (both faces zero).
struct Piece<'a> {
    i: usize,
    face_i: Face,
    j: usize,
    face_j: Face,
    iso: Option<&'a IntMatrix>,
}

fn pieces(fan: &KatoFan) -> Vec<Piece<'_>> {
    let mut out: Vec<Piece<'_>> = (0..fan.charts().len())
        .map(|c| Piece { i: c, face_i: Face::new(vec![]), j: c, face_j: Face::new(vec![]), iso: None })
        .collect();
    out.extend(fan.gluings().iter().map(|g| Piece {
        i: g.i,
        face_i: g.face_i.clone(),
        j: g.j,
        face_j: g.face_j.clone(),
        iso: Some(&g.iso),
    }));
    out
}

/// `P_i^gp -> P_j^gp` modulo `face_j`, induced by a piece.
fn piece_lift(fan: &KatoFan, piece: &Piece<'_>) -> Result<IntMatrix> {
    let Some(iso) = piece.iso else {
        return Ok(Matrix::identity(fan.charts()[piece.i].rank()));
    };
    let li = sharp_localize(&fan.charts()[piece.i], &piece.face_i)?;
    let lj = sharp_localize(&fan.charts()[piece.j], &piece.face_j)?;
    let sec = lattice::right_inverse(lj.hom.matrix()).expect("localization is surjective");
    Ok(&(&sec * iso) * li.hom.matrix())
}

/// `F ×_H G` for morphisms `f: F -> H`, `g: G -> H` with `H` affine.
pub fn fiber_product(f: &KatoFanMorphism, g: &KatoFanMorphism) -> Result<FiberProduct> {
    if f.target() != g.target() {
        return Err(Error::Incompatible("morphisms have different targets".into()));
    }
    if !f.target().is_affine() {
        return Err(Error::Incompatible("fiber products are computed over an affine base".into()));
    }
    let (nf, ng) = (f.source().charts().len(), g.source().charts().len());
    let mut charts: Vec<Chart> = Vec::with_capacity(nf * ng);
    let mut pairs = Vec::with_capacity(nf * ng);
    for a in 0..nf {
        for b in 0..ng {
            let po = fs_pushout(&f.chart_maps()[a].hom, &g.chart_maps()[b].hom)?;
            let (sharp, q) = po.monoid.sharpen();
            charts.push(Chart {
                monoid: sharp,
                p1: q.matrix() * po.left.matrix(),
                p2: q.matrix() * po.right.matrix(),
            });
            pairs.push((a, b));
        }
    }
    let index = |a: usize, b: usize| a * ng + b;

    let hull = |c: &Chart, fa: &Face, pa: &AffineMonoid, gb: &Face, qb: &AffineMonoid| {
        let mut images: Vec<Vector> = fa.generators(pa).iter().map(|v| c.p1.mul_vec(v)).collect();
        images.extend(gb.generators(qb).iter().map(|v| c.p2.mul_vec(v)));
        face_hull(&c.monoid, &images)
    };

    let (ff, gf) = (f.source(), g.source());
    let mut gluings = Vec::new();
    for x in pieces(ff) {
        let lx = piece_lift(ff, &x)?;
        for y in pieces(gf) {
            if x.iso.is_none() && y.iso.is_none() {
                continue;
            }
            let ly = piece_lift(gf, &y)?;
            let (c1, c2) = (index(x.i, y.i), index(x.j, y.j));
            let k1 = hull(&charts[c1], &x.face_i, &ff.charts()[x.i], &y.face_i, &gf.charts()[y.i]);
            let k2 = hull(&charts[c2], &x.face_j, &ff.charts()[x.j], &y.face_j, &gf.charts()[y.j]);
            let l1 = sharp_localize(&charts[c1].monoid, &k1)?;
            let l2 = sharp_localize(&charts[c2].monoid, &k2)?;
            let lambda = l1.hom.matrix() * &charts[c1].p1.hstack(&charts[c1].p2)?;
            let big = (l2.hom.matrix() * &(&charts[c2].p1 * &lx)).hstack(&(l2.hom.matrix() * &(&charts[c2].p2 * &ly)))?;
            let iso = lattice::factor_through(&big, &lambda).ok_or_else(|| {
                Error::Incompatible("gluings of the factors are not compatible over the base".into())
            })?;
            gluings.push(Gluing { i: c1, face_i: k1, j: c2, face_j: k2, iso });
        }
    }

    let first_maps: Vec<(usize, IntMatrix)> = charts.iter().zip(&pairs).map(|(c, &(a, _))| (a, c.p1.clone())).collect();
    let second_maps: Vec<(usize, IntMatrix)> = charts.iter().zip(&pairs).map(|(c, &(_, b))| (b, c.p2.clone())).collect();
    let fan = KatoFan::new(charts.into_iter().map(|c| c.monoid).collect(), gluings)?;
    let first = KatoFanMorphism::new(fan.clone(), ff.clone(), first_maps)?;
    let second = KatoFanMorphism::new(fan.clone(), gf.clone(), second_maps)?;
    Ok(FiberProduct { fan, first, second, pairs })
}
