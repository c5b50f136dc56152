use super::{AffineMonoid, MonoidHom, Vector};
use crate::error::{Error, Result};
use crate::lattice;

/// Amalgamated sum `P ⊕_S Q` in fs monoids, with its two insertions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pushout {
    pub monoid: AffineMonoid,
    pub left: MonoidHom,
    pub right: MonoidHom,
}

/// fs pushout of `h1: S -> P` and `h2: S -> Q`.
///
/// The group is `(Z^p ⊕ Z^q) / sat{(h1 s, -h2 s)}`; the integral pushout is
/// the image of `P ⊕ Q` there, which is then saturated. Dividing by the
/// saturated relation lattice keeps the result torsion free, so the
/// universal property holds against every lattice-embedded target.
pub fn fs_pushout(h1: &MonoidHom, h2: &MonoidHom) -> Result<Pushout> {
    if h1.source() != h2.source() {
        return Err(Error::Incompatible("pushout legs have different sources".into()));
    }
    let s = h1.source().rank();
    let (p, q) = (h1.target().rank(), h2.target().rank());
    let relations: Vec<Vector> = (0..s)
        .map(|j| {
            let mut v = h1.matrix().column(j);
            v.extend(h2.matrix().column(j).into_iter().map(|x| -x));
            v
        })
        .collect();
    let pi = lattice::quotient_projection(p + q, &relations);
    let left_cols: Vec<usize> = (0..p).collect();
    let right_cols: Vec<usize> = (p..p + q).collect();
    let left = pi.select_columns(&left_cols);
    let right = pi.select_columns(&right_cols);

    let mut gens: Vec<Vector> = h1.target().generators().iter().map(|g| left.mul_vec(g)).collect();
    gens.extend(h2.target().generators().iter().map(|g| right.mul_vec(g)));
    let monoid = AffineMonoid::saturation_of(pi.rows(), gens);
    Ok(Pushout {
        left: MonoidHom::new_unchecked(h1.target().clone(), monoid.clone(), left),
        right: MonoidHom::new_unchecked(h2.target().clone(), monoid.clone(), right),
        monoid,
    })
}
