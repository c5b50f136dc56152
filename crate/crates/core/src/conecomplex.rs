//! Extended cones `Hom(P, R̄≥0)` and extended cone complexes of Kato fans.
//!
//! A point `u` of the extended cone of a sharp monoid is infinite exactly on
//! a prime ideal `q` and linear on the complementary face. It is stored by
//! its values on the generators of `P`, together with a rational functional
//! that reproduces the finite values.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::katofan::{FanPoint, KatoFan};
use crate::lattice::{self, dot, Matrix};
use crate::linalg;
use crate::monoid::{face_functional, AffineMonoid, Face, MonoidHom};
use crate::scalar::Scalar;
use crate::stack::KatoGroupoid;
use crate::IntMatrix;

/// An element of `R̄≥0 = R≥0 ∪ {∞}` with rational finite part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedNonneg<S> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> ExtendedNonneg<S> {
    pub fn zero() -> Self {
        ExtendedNonneg::Finite(S::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedNonneg::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedNonneg::Finite(x) if x.is_zero())
    }

    pub fn is_positive(&self) -> bool {
        match self {
            ExtendedNonneg::Infinity => true,
            ExtendedNonneg::Finite(x) => x.is_positive(),
        }
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            ExtendedNonneg::Finite(x) => Some(x),
            ExtendedNonneg::Infinity => None,
        }
    }

    /// Total order with `∞` largest (incomparable finite values count as equal).
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedNonneg::Infinity, ExtendedNonneg::Infinity) => Ordering::Equal,
            (ExtendedNonneg::Infinity, _) => Ordering::Greater,
            (_, ExtendedNonneg::Infinity) => Ordering::Less,
            (ExtendedNonneg::Finite(a), ExtendedNonneg::Finite(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other.total_cmp(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// Parses `"inf"`, `"∞"` or a rational.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Some(ExtendedNonneg::Infinity),
            t => S::parse(t).map(ExtendedNonneg::Finite),
        }
    }
}

impl<S: Scalar> PartialOrd for ExtendedNonneg<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedNonneg::Finite(a), ExtendedNonneg::Finite(b)) => a.partial_cmp(b),
            _ => Some(self.total_cmp(other)),
        }
    }
}

impl<S: Scalar> Add for ExtendedNonneg<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedNonneg::Finite(a), ExtendedNonneg::Finite(b)) => ExtendedNonneg::Finite(a + b),
            _ => ExtendedNonneg::Infinity,
        }
    }
}

impl<S: Scalar> fmt::Display for ExtendedNonneg<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNonneg::Finite(x) => write!(f, "{x}"),
            ExtendedNonneg::Infinity => write!(f, "inf"),
        }
    }
}

/// Lexicographic comparison of value vectors with `∞` largest.
pub fn cmp_values<S: Scalar>(a: &[ExtendedNonneg<S>], b: &[ExtendedNonneg<S>]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// A point `u ∈ Hom(P, R̄≥0)` of the extended cone of a sharp monoid.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedConePoint<S> {
    monoid: AffineMonoid,
    /// Complement of the infinity prime.
    face: Face,
    values: Vec<ExtendedNonneg<S>>,
    /// Rational functional on the canonical lattice agreeing with `u` on the face.
    functional: Vec<S>,
}

impl<S: Scalar> ExtendedConePoint<S> {
    /// `u = ∞` on the generators listed in `infinity_prime`, and the given
    /// values on the remaining generators, in index order.
    pub fn new(monoid: &AffineMonoid, infinity_prime: &[usize], finite_part: Vec<S>) -> Result<Self> {
        if !monoid.is_sharp() {
            return Err(Error::NotSharp("extended cones are taken over sharp monoids".into()));
        }
        let n = monoid.generators().len();
        if let Some(i) = infinity_prime.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidPoint(format!("infinity_prime index {i} out of range")));
        }
        let face = Face::from_prime(monoid, infinity_prime);
        if !crate::monoid::is_face(monoid, &face) {
            return Err(Error::InvalidPoint("infinity_prime is not a prime ideal".into()));
        }
        if finite_part.len() != face.len() {
            return Err(Error::InvalidPoint(format!(
                "finite_part has {} values for {} face generators",
                finite_part.len(),
                face.len()
            )));
        }
        if finite_part.iter().any(|x| x.is_negative()) {
            return Err(Error::InvalidPoint("finite_part must be nonnegative".into()));
        }
        let gens = face.generators(monoid);
        let a: Matrix<S> = linalg::to_field(&Matrix::from_rows(monoid.rank(), &gens)?);
        let functional = linalg::solve(&a, &finite_part)
            .ok_or_else(|| Error::InvalidPoint("finite_part is not linear on the face".into()))?;
        let mut values = vec![ExtendedNonneg::Infinity; n];
        for (&i, v) in face.indices().iter().zip(finite_part) {
            values[i] = ExtendedNonneg::Finite(v);
        }
        Ok(ExtendedConePoint { monoid: monoid.clone(), face, values, functional })
    }

    /// From values on all generators.
    pub fn from_values(monoid: &AffineMonoid, values: Vec<ExtendedNonneg<S>>) -> Result<Self> {
        if values.len() != monoid.generators().len() {
            return Err(Error::InvalidPoint(format!(
                "{} values for {} generators",
                values.len(),
                monoid.generators().len()
            )));
        }
        let prime: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_infinite()).collect();
        let finite: Vec<S> = values.iter().filter_map(|v| v.finite().cloned()).collect();
        ExtendedConePoint::new(monoid, &prime, finite)
    }

    /// `u = y` on the face, `∞` on the prime.
    pub fn from_functional(monoid: &AffineMonoid, infinity_prime: &[usize], y: &[S]) -> Result<Self> {
        if y.len() != monoid.rank() {
            return Err(Error::Dimension("functional length".into()));
        }
        let face = Face::from_prime(monoid, infinity_prime);
        let finite: Vec<S> = face
            .generators(monoid)
            .iter()
            .map(|g| dot(y, &linalg::vec_to_field::<S>(g)))
            .collect();
        ExtendedConePoint::new(monoid, infinity_prime, finite)
    }

    pub fn zero(monoid: &AffineMonoid) -> Result<Self> {
        ExtendedConePoint::new(monoid, &[], vec![S::zero(); monoid.generators().len()])
    }

    pub fn monoid(&self) -> &AffineMonoid {
        &self.monoid
    }

    /// Values on the generators of the monoid, in order.
    pub fn values(&self) -> &[ExtendedNonneg<S>] {
        &self.values
    }

    pub fn face(&self) -> &Face {
        &self.face
    }

    pub fn functional(&self) -> &[S] {
        &self.functional
    }

    pub fn infinity_prime(&self) -> Vec<usize> {
        self.face.prime(&self.monoid)
    }

    /// Values on the face generators, in index order.
    pub fn finite_part(&self) -> Vec<S> {
        self.face.indices().iter().map(|&i| self.values[i].finite().expect("face value").clone()).collect()
    }

    /// `u(p)`; fails when `p ∉ P`.
    pub fn eval(&self, p: &[BigInt]) -> Result<ExtendedNonneg<S>> {
        if !self.monoid.contains(p) {
            return Err(Error::NotInMonoid(format!("{p:?}")));
        }
        Ok(self.eval_cone(p))
    }

    /// `u(p)` for `p` in the cone of `P` (no membership check).
    pub(crate) fn eval_cone(&self, p: &[BigInt]) -> ExtendedNonneg<S> {
        let phi = face_functional(&self.monoid, &self.face);
        if !dot(&phi, p).is_zero() {
            return ExtendedNonneg::Infinity;
        }
        ExtendedNonneg::Finite(dot(&self.functional, &linalg::vec_to_field::<S>(p)))
    }
}

impl<S: Scalar> Eq for ExtendedConePoint<S> where S: Eq {}

/// `ρ(u) = u⁻¹(∞)`, as generator indices.
pub fn structure_map<S: Scalar>(u: &ExtendedConePoint<S>) -> Vec<usize> {
    u.infinity_prime()
}

/// `r(u) = u⁻¹(R̄>0)`, as generator indices.
pub fn reduction_map<S: Scalar>(u: &ExtendedConePoint<S>) -> Vec<usize> {
    (0..u.values.len()).filter(|&i| u.values[i].is_positive()).collect()
}

pub fn eval_extended<S: Scalar>(u: &ExtendedConePoint<S>, p: &[BigInt]) -> Result<ExtendedNonneg<S>> {
    u.eval(p)
}

/// `u ∘ h` for `h: Q -> P`, where `u` lives on `P`.
pub fn pullback_point<S: Scalar>(u: &ExtendedConePoint<S>, h: &MonoidHom) -> Result<ExtendedConePoint<S>> {
    if h.target() != u.monoid() {
        return Err(Error::Incompatible("hom does not land in the monoid of the point".into()));
    }
    compose(u, h.source(), h.matrix())
}

/// `ū ∘ h` for a hom `h: Q -> P` given by its matrix (pullback of values).
fn compose<S: Scalar>(u: &ExtendedConePoint<S>, q: &AffineMonoid, h: &IntMatrix) -> Result<ExtendedConePoint<S>> {
    let values = q.generators().iter().map(|g| u.eval_cone(&h.mul_vec(g))).collect();
    ExtendedConePoint::from_values(q, values)
}

/// A point of the extended cone complex of a fan.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint<S> {
    pub chart: usize,
    pub point: ExtendedConePoint<S>,
}

impl<S: Scalar> ComplexPoint<S> {
    pub fn new(fan: &KatoFan, chart: usize, point: ExtendedConePoint<S>) -> Result<Self> {
        let Some(p) = fan.charts().get(chart) else {
            return Err(Error::OutOfRange(format!("chart {chart}")));
        };
        if *p != point.monoid {
            return Err(Error::InvalidPoint(format!("point is not on chart {chart}")));
        }
        Ok(ComplexPoint { chart, point })
    }

    pub(crate) fn key(&self) -> (usize, &[ExtendedNonneg<S>]) {
        (self.chart, self.point.values())
    }
}

/// Lexicographic order on complex points (chart first, `∞` largest).
pub fn cmp_complex<S: Scalar>(a: &ComplexPoint<S>, b: &ComplexPoint<S>) -> Ordering {
    let (ca, va) = a.key();
    let (cb, vb) = b.key();
    ca.cmp(&cb).then_with(|| cmp_values(va, vb))
}

/// A complex point as the fan point hit by the closed point of
/// `Spec R̄≥0`, with a local point of that point's local monoid.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPoint<S> {
    pub point: usize,
    pub local: ExtendedConePoint<S>,
}

/// Moves a complex point to the representative chart of the fan point it
/// reduces to.
pub fn localize_point<S: Scalar>(fan: &KatoFan, cp: &ComplexPoint<S>) -> Result<LocalPoint<S>> {
    let p = &fan.charts()[cp.chart];
    let zero_face = Face::new((0..p.generators().len()).filter(|&i| cp.point.values[i].is_zero()).collect());
    let occ = FanPoint { chart: cp.chart, face: zero_face };
    let x = fan
        .point_index(occ.chart, &occ.face)
        .ok_or_else(|| Error::InvalidPoint("zero set is not a face".into()))?;
    let loc = fan.local(&occ);
    // every generator of the local monoid is the image of a chart generator
    let values: Vec<ExtendedNonneg<S>> = loc
        .monoid
        .generators()
        .iter()
        .map(|m| {
            let i = (0..p.generators().len())
                .find(|&i| loc.hom.apply(&p.generators()[i]) == *m)
                .expect("localization generators are images");
            cp.point.values[i].clone()
        })
        .collect();
    let here = ExtendedConePoint::from_values(&loc.monoid, values)?;
    let to_here = fan.stalk_iso(x, &occ).expect("occurrence of its own class");
    let local = compose(&here, fan.local_monoid(x), to_here)?;
    Ok(LocalPoint { point: x, local })
}

/// Inverse of [`localize_point`] onto the representative chart.
pub fn globalize_point<S: Scalar>(fan: &KatoFan, lp: &LocalPoint<S>) -> Result<ComplexPoint<S>> {
    let rep = &fan.points()[lp.point];
    let loc = fan.local(rep);
    let point = compose(&lp.local, &fan.charts()[rep.chart], loc.hom.matrix())?;
    Ok(ComplexPoint { chart: rep.chart, point })
}

/// Canonical chart coordinates of a complex point.
pub fn canonical_point<S: Scalar>(fan: &KatoFan, cp: &ComplexPoint<S>) -> Result<ComplexPoint<S>> {
    globalize_point(fan, &localize_point(fan, cp)?)
}

/// Whether two complex points are identified by the gluings.
pub fn complex_points_equal<S: Scalar>(fan: &KatoFan, a: &ComplexPoint<S>, b: &ComplexPoint<S>) -> Result<bool> {
    Ok(localize_point(fan, a)? == localize_point(fan, b)?)
}

/// Orbit of a complex point of `Σ̄_U` under a strict groupoid.
#[derive(Clone, Debug, PartialEq)]
pub struct Coequalized<S> {
    pub representative: ComplexPoint<S>,
    /// Canonical forms of the orbit, sorted.
    pub orbit: Vec<ComplexPoint<S>>,
    /// Number of breadth-first rounds used.
    pub depth: usize,
    pub depth_bound: usize,
}

/// Class of `pt` in the generalized extended cone complex of `[U/R]`.
pub fn coequalize<S: Scalar>(gr: &KatoGroupoid, pt: &ComplexPoint<S>) -> Result<Coequalized<S>> {
    let germs = gr.germs().ok_or_else(|| Error::NotStrict("coequalize needs strict source and target maps".into()))?;
    let u = gr.u();
    let n = u.charts().len() + gr.r().charts().len();
    let depth_bound = n * n;

    // moves at a U-point x: (y, M(y) -> M(x)); inverse germs are included
    let mut moves: Vec<Vec<(usize, IntMatrix)>> = vec![Vec::new(); u.points().len()];
    for g in germs {
        moves[g.source].push((g.target, g.map.clone()));
        let inv = lattice::unimodular_inverse(&g.map).expect("germs are isomorphisms");
        moves[g.target].push((g.source, inv));
    }

    let start = localize_point(u, pt)?;
    let mut seen: Vec<LocalPoint<S>> = vec![start.clone()];
    let mut frontier = VecDeque::from([start]);
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = VecDeque::new();
        for lp in frontier {
            for (y, m) in &moves[lp.point] {
                let moved = LocalPoint { point: *y, local: compose(&lp.local, u.local_monoid(*y), m)? };
                if !seen.contains(&moved) {
                    seen.push(moved.clone());
                    next.push_back(moved);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        depth += 1;
        if depth > depth_bound {
            return Err(Error::InvalidAction(format!("orbit not closed after {depth_bound} rounds")));
        }
        frontier = next;
    }

    let mut orbit: Vec<ComplexPoint<S>> = seen.iter().map(|lp| globalize_point(u, lp)).collect::<Result<_>>()?;
    orbit.sort_by(cmp_complex);
    Ok(Coequalized { representative: orbit[0].clone(), orbit, depth, depth_bound })
}

/// For each prime of `P` (by generator indices), how many of the given
/// points reduce to it. Used by `--emit-strata`.
pub fn strata<S: Scalar>(p: &AffineMonoid, points: &[ExtendedConePoint<S>]) -> Vec<(Vec<usize>, usize)> {
    let mut out: Vec<(Vec<usize>, usize)> =
        crate::monoid::faces(p).iter().map(|f| (f.prime(p), 0)).collect();
    for u in points {
        let r = reduction_map(u);
        if let Some(e) = out.iter_mut().find(|e| e.0 == r) {
            e.1 += 1;
        }
    }
    out
}
