//! Kato stacks presented by strict groupoids `R ⇉ U` of Kato fans.
//!
//! With `s` and `t` strict, every point `r` of `R` gives an isomorphism of
//! local monoids of `U`, its germ `M(t r) -> M(s r)`. Groupoid axioms,
//! isotropy and faithful monodromy are all decided on these germs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::katofan::{spec_fan, Gluing, KatoFan, KatoFanMorphism};
use crate::lattice::{self, Matrix};
use crate::monoid::{face_hull, faces, sharp_localize, validate_hom, AffineMonoid, Face, Vector};
use crate::IntMatrix;

/// Default bound on the size of a generated group.
pub const DEFAULT_MAX_ORBIT: usize = 10_000;

/// Local isomorphism carried by a point of `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Germ {
    /// Point of `R`.
    pub arrow: usize,
    /// `s(arrow)`, a point of `U`.
    pub source: usize,
    /// `t(arrow)`.
    pub target: usize,
    /// `M_U(target) -> M_U(source)` at representatives.
    pub map: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatoGroupoid {
    u: KatoFan,
    r: KatoFan,
    s: KatoFanMorphism,
    t: KatoFanMorphism,
    germs: Option<Vec<Germ>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupoidReport {
    pub s_strict: bool,
    pub t_strict: bool,
    pub surjective: bool,
    pub unit: bool,
    pub inverse: bool,
    pub composition: bool,
    pub violations: Vec<String>,
    /// `(r1, r2) -> r` with `r` realizing `r2 ∘ r1`, for `t(r1) = s(r2)`.
    pub composition_witness: BTreeMap<(usize, usize), usize>,
    /// Identity arrow at each point of `U`.
    pub units: Vec<Option<usize>>,
    /// Inverse of each arrow.
    pub inverses: Vec<Option<usize>>,
}

impl GroupoidReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl KatoGroupoid {
    pub fn new(s: KatoFanMorphism, t: KatoFanMorphism) -> Result<Self> {
        if s.source() != t.source() || s.target() != t.target() {
            return Err(Error::Incompatible("s and t must share source and target".into()));
        }
        let germs = (s.is_strict() && t.is_strict()).then(|| {
            (0..s.source().points().len())
                .map(|r| {
                    let ys = lattice::unimodular_inverse(s.stalk_map(r).matrix()).expect("strict stalk map");
                    Germ { arrow: r, source: s.map_point(r), target: t.map_point(r), map: &ys * t.stalk_map(r).matrix() }
                })
                .collect()
        });
        Ok(KatoGroupoid { u: s.target().clone(), r: s.source().clone(), s, t, germs })
    }

    /// `U ⇉ U` by identities.
    pub fn trivial(u: &KatoFan) -> Self {
        let id = KatoFanMorphism::identity(u);
        KatoGroupoid::new(id.clone(), id).expect("identity groupoid")
    }

    pub fn u(&self) -> &KatoFan {
        &self.u
    }

    pub fn r(&self) -> &KatoFan {
        &self.r
    }

    pub fn s(&self) -> &KatoFanMorphism {
        &self.s
    }

    pub fn t(&self) -> &KatoFanMorphism {
        &self.t
    }

    /// Germs of all arrows; `None` unless `s` and `t` are strict.
    pub fn germs(&self) -> Option<&[Germ]> {
        self.germs.as_deref()
    }

    fn find(&self, source: usize, target: usize, map: &IntMatrix) -> Option<usize> {
        self.germs
            .as_ref()?
            .iter()
            .find(|g| g.source == source && g.target == target && g.map == *map)
            .map(|g| g.arrow)
    }

    pub fn validate(&self) -> GroupoidReport {
        let mut rep = GroupoidReport {
            s_strict: self.s.is_strict(),
            t_strict: self.t.is_strict(),
            ..GroupoidReport::default()
        };
        if !rep.s_strict {
            rep.violations.push("s not strict".into());
        }
        if !rep.t_strict {
            rep.violations.push("t not strict".into());
        }
        let mut hit = vec![false; self.u.points().len()];
        for r in 0..self.r.points().len() {
            hit[self.s.map_point(r)] = true;
            hit[self.t.map_point(r)] = true;
        }
        rep.surjective = hit.iter().all(|h| *h);
        if !rep.surjective {
            rep.violations.push("s and t are not jointly surjective on points".into());
        }
        let Some(germs) = &self.germs else {
            rep.violations.push("groupoid axioms not checked: germs need strict s and t".into());
            return rep;
        };

        rep.units = (0..self.u.points().len())
            .map(|x| self.find(x, x, &Matrix::identity(self.u.local_monoid(x).rank())))
            .collect();
        rep.unit = rep.units.iter().all(Option::is_some);
        for (x, e) in rep.units.iter().enumerate() {
            if e.is_none() {
                rep.violations.push(format!("no identity arrow at point {x}"));
            }
        }

        rep.inverses = germs
            .iter()
            .map(|g| {
                let inv = lattice::unimodular_inverse(&g.map)?;
                self.find(g.target, g.source, &inv)
            })
            .collect();
        rep.inverse = rep.inverses.iter().all(Option::is_some);
        for (r, i) in rep.inverses.iter().enumerate() {
            if i.is_none() {
                rep.violations.push(format!("arrow {r} has no inverse"));
            }
        }

        rep.composition = true;
        for g1 in germs {
            for g2 in germs.iter().filter(|g| g.source == g1.target) {
                match self.find(g1.source, g2.target, &(&g1.map * &g2.map)) {
                    Some(r) => {
                        rep.composition_witness.insert((g1.arrow, g2.arrow), r);
                    }
                    None => {
                        rep.composition = false;
                        rep.violations.push(format!("arrows {} and {} have no composite", g1.arrow, g2.arrow));
                    }
                }
            }
        }
        rep
    }

    /// Arrows over `(x, x)` with their local automorphisms of `M(x)`.
    pub fn isotropy(&self, x: usize) -> Result<Vec<(usize, IntMatrix)>> {
        let germs = self.germs.as_ref().ok_or_else(|| Error::NotStrict("isotropy needs strict s and t".into()))?;
        let mut out: Vec<(usize, IntMatrix)> = germs
            .iter()
            .filter(|g| g.source == x && g.target == x)
            .map(|g| (g.arrow, g.map.clone()))
            .collect();
        out.sort_by(|a, b| b.1.is_identity().cmp(&a.1.is_identity()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// Isotropy acts faithfully on local monoids at every point.
    pub fn faithful_monodromy(&self) -> Result<bool> {
        for x in 0..self.u.points().len() {
            let iso = self.isotropy(x)?;
            let distinct: BTreeSet<&IntMatrix> = iso.iter().map(|(_, m)| m).collect();
            if distinct.len() != iso.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A finite group acting on an affine fan `Spec P` by monoid automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    monoid: AffineMonoid,
    generators: Vec<IntMatrix>,
    /// Group elements, identity first, then sorted.
    elements: Vec<IntMatrix>,
}

impl GroupAction {
    pub fn new(monoid: AffineMonoid, generators: Vec<IntMatrix>, max_orbit: usize) -> Result<Self> {
        if !monoid.is_sharp() || !monoid.is_saturated() {
            return Err(Error::InvalidAction("the acted-on monoid must be sharp and saturated".into()));
        }
        for (k, g) in generators.iter().enumerate() {
            let (_, class) = validate_hom(g.clone(), &monoid, &monoid)
                .map_err(|e| Error::InvalidAction(format!("generator {k}: {e}")))?;
            if !class.is_iso {
                return Err(Error::InvalidAction(format!("generator {k} is not an automorphism")));
            }
        }
        let id: IntMatrix = Matrix::identity(monoid.rank());
        let mut seen: BTreeSet<IntMatrix> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id.clone()]);
        while let Some(h) = queue.pop_front() {
            for g in &generators {
                let p = g * &h;
                if seen.insert(p.clone()) {
                    if seen.len() > max_orbit {
                        return Err(Error::InvalidAction(format!(
                            "generated group exceeds {max_orbit} elements"
                        )));
                    }
                    queue.push_back(p);
                }
            }
        }
        seen.remove(&id);
        let mut elements = vec![id];
        elements.extend(seen);
        Ok(GroupAction { monoid, generators, elements })
    }

    pub fn monoid(&self) -> &AffineMonoid {
        &self.monoid
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    /// Faces mapped to themselves by every element.
    pub fn invariant_faces(&self) -> Vec<Face> {
        faces(&self.monoid)
            .into_iter()
            .filter(|f| {
                self.generators.iter().all(|g| {
                    let images: Vec<Vector> = f.generators(&self.monoid).iter().map(|v| g.mul_vec(v)).collect();
                    face_hull(&self.monoid, &images) == *f
                })
            })
            .collect()
    }

    /// Induced action of each element on the sharp localization at `face`.
    pub fn localized(&self, face: &Face) -> Result<Vec<IntMatrix>> {
        let loc = sharp_localize(&self.monoid, face)?;
        self.elements
            .iter()
            .map(|g| {
                lattice::factor_through(&(loc.hom.matrix() * g), loc.hom.matrix())
                    .ok_or_else(|| Error::InvalidAction("face is not invariant".into()))
            })
            .collect()
    }
}

/// `U ∗ G`: one copy of `Spec P` per group element, with copies `a` and `b`
/// glued over every open `D(F)` on which `a` and `b` induce the same map to
/// `U`. On invariant faces this is the image of `G` in `Aut(D(F))`; using all
/// faces also kills elements that only act ineffectively near a point.
pub fn twisted_product(action: &GroupAction) -> Result<KatoGroupoid> {
    let p = action.monoid();
    let u = spec_fan(p)?;
    let n = action.elements().len();
    let locs: Vec<(Face, IntMatrix, usize)> = faces(p)
        .into_iter()
        .map(|f| {
            let loc = sharp_localize(p, &f)?;
            Ok((f, loc.hom.matrix().clone(), loc.monoid.rank()))
        })
        .collect::<Result<_>>()?;

    let mut gluings = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (ga, gb) = (&action.elements()[a], &action.elements()[b]);
            let agree: Vec<&(Face, IntMatrix, usize)> =
                locs.iter().filter(|(_, l, _)| l * ga == l * gb).collect();
            for (f, _, dim) in &agree {
                if agree.iter().any(|(h, _, _)| h != f && h.is_subset(f)) {
                    continue;
                }
                gluings.push(Gluing { i: a, face_i: f.clone(), j: b, face_j: f.clone(), iso: Matrix::identity(*dim) });
            }
        }
    }
    let r = KatoFan::new(vec![p.clone(); n], gluings)?;
    let s_maps = (0..n).map(|_| (0, Matrix::identity(p.rank()))).collect();
    let t_maps = action.elements().iter().map(|g| (0, g.clone())).collect();
    let s = KatoFanMorphism::new(r.clone(), u.clone(), s_maps)?;
    let t = KatoFanMorphism::new(r, u, t_maps)?;
    KatoGroupoid::new(s, t)
}

/// Presentation of `[pt / G]` for a group of order `order` acting on `Spec 0`.
pub fn classifying_groupoid(order: usize) -> Result<KatoGroupoid> {
    let zero = AffineMonoid::zero();
    let u = spec_fan(&zero)?;
    let r = KatoFan::new(vec![zero; order], Vec::new())?;
    let fold: Vec<(usize, IntMatrix)> = (0..order).map(|_| (0, Matrix::zeros(0, 0))).collect();
    let s = KatoFanMorphism::new(r.clone(), u.clone(), fold.clone())?;
    let t = KatoFanMorphism::new(r, u, fold)?;
    KatoGroupoid::new(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{automorphisms, ints};

    fn swap() -> IntMatrix {
        Matrix::from_rows(2, &[ints(&[0, 1]), ints(&[1, 0])]).unwrap()
    }

    #[test]
    fn trivial_groupoid() {
        let u = spec_fan(&AffineMonoid::free(2)).unwrap();
        let g = KatoGroupoid::trivial(&u);
        assert!(g.validate().is_valid());
        assert!(g.faithful_monodromy().unwrap());
        for x in 0..u.points().len() {
            assert_eq!(g.isotropy(x).unwrap().len(), 1);
        }
    }

    #[test]
    fn swap_twisted_product() {
        let n2 = AffineMonoid::free(2);
        let a = GroupAction::new(n2.clone(), vec![swap()], DEFAULT_MAX_ORBIT).unwrap();
        assert_eq!(a.elements().len(), 2);
        assert_eq!(a.invariant_faces(), vec![Face::new(vec![]), Face::new(vec![0, 1])]);
        let g = twisted_product(&a).unwrap();
        assert_eq!(g.r().charts().len(), 2);
        assert_eq!(g.r().points().len(), 7);
        let rep = g.validate();
        assert!(rep.is_valid(), "{:?}", rep.violations);
        assert!(g.faithful_monodromy().unwrap());
        let u = g.u();
        let closed = u.point_index(0, &Face::new(vec![])).unwrap();
        let generic = u.point_index(0, &Face::new(vec![0, 1])).unwrap();
        let iso = g.isotropy(closed).unwrap();
        assert_eq!(iso.len(), 2);
        assert!(iso[0].1.is_identity());
        assert_eq!(iso[1].1, swap());
        assert_eq!(g.isotropy(generic).unwrap().len(), 1);
    }

    #[test]
    fn ineffective_action_collapses() {
        let n = AffineMonoid::free(1);
        let a = GroupAction::new(n.clone(), vec![Matrix::identity(1)], DEFAULT_MAX_ORBIT).unwrap();
        let g = twisted_product(&a).unwrap();
        assert_eq!(g.r(), g.u());
        assert!(g.s().chart_maps()[0].hom.matrix().is_identity());
        assert!(g.t().chart_maps()[0].hom.matrix().is_identity());
    }

    #[test]
    fn classifying_stack_is_not_faithful() {
        let g = classifying_groupoid(2).unwrap();
        assert!(g.validate().is_valid());
        assert!(!g.faithful_monodromy().unwrap());
    }

    #[test]
    fn non_strict_source_is_reported() {
        let n = spec_fan(&AffineMonoid::free(1)).unwrap();
        let twice = KatoFanMorphism::new(n.clone(), n.clone(), vec![(0, Matrix::from_rows(1, &[ints(&[2])]).unwrap())]).unwrap();
        let g = KatoGroupoid::new(twice, KatoFanMorphism::identity(&n)).unwrap();
        let rep = g.validate();
        assert!(!rep.is_valid());
        assert!(rep.violations.contains(&"s not strict".to_string()));
        assert!(g.isotropy(0).is_err());
    }

    #[test]
    fn full_automorphism_group_gives_full_isotropy() {
        let p = crate::monoid::make_monoid(2, &[ints(&[1, 0]), ints(&[1, 1]), ints(&[1, 2])]).unwrap();
        let auts = automorphisms(&p).unwrap();
        let a = GroupAction::new(p.clone(), auts.clone(), DEFAULT_MAX_ORBIT).unwrap();
        let g = twisted_product(&a).unwrap();
        assert!(g.validate().is_valid());
        let closed = g.u().point_index(0, &Face::new(vec![])).unwrap();
        assert_eq!(g.isotropy(closed).unwrap().len(), auts.len());
    }

    #[test]
    fn infinite_group_is_rejected() {
        // automorphisms of sharp monoids have finite order; exercise the guard
        let n2 = AffineMonoid::free(2);
        assert!(matches!(GroupAction::new(n2, vec![swap()], 1), Err(Error::InvalidAction(_))));
    }
}
