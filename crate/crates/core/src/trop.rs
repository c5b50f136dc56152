//! Analytic points on affine charts, in exact `−log` scale.
//!
//! Two computable classes of points of `Spec k[P]^an` (trivially valued `k`,
//! rational coefficients standing in for `k`):
//!
//! * Gauss points `J_P(u)`: `|f| = max |a_p| e^{−u(p)}`, i.e. `min u(p)`;
//! * arc points: `χ^p ↦ c(p) s^{u(p)}` for a character `c` of the face group
//!   of `u`, valued by the `s`-adic order after exact cancellation.
//!
//! Seminorm values are `ExtendedNonneg`: `∞` stands for `|f| = 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conecomplex::{coequalize, ComplexPoint, ExtendedConePoint, ExtendedNonneg};
use crate::error::{Error, Result};
use crate::katofan::{spec_fan, KatoFan};
use crate::lattice;
use crate::monoid::{AffineMonoid, MonoidHom, Vector};
use crate::scalar::Scalar;
use crate::stack::KatoGroupoid;

/// `−log |f|`.
pub type LogValue<S> = ExtendedNonneg<S>;

fn check_exponent(monoid: &AffineMonoid, p: &[BigInt]) -> Result<()> {
    if p.len() != monoid.rank() {
        return Err(Error::Dimension(format!("exponent of length {} in rank {}", p.len(), monoid.rank())));
    }
    if !monoid.contains(p) {
        return Err(Error::NotInMonoid(format!("exponent {p:?} is not in the monoid")));
    }
    Ok(())
}

fn add_vec(a: &[BigInt], b: &[BigInt]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `f = Σ a_p χ^p ∈ k[P]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonPolynomial<S> {
    monoid: AffineMonoid,
    terms: BTreeMap<Vector, S>,
}

impl<S: Scalar> MonPolynomial<S> {
    /// Repeated exponents are summed; zero coefficients are dropped.
    pub fn new(monoid: &AffineMonoid, terms: impl IntoIterator<Item = (Vector, S)>) -> Result<Self> {
        let mut out: BTreeMap<Vector, S> = BTreeMap::new();
        for (p, a) in terms {
            check_exponent(monoid, &p)?;
            let e = out.entry(p).or_insert_with(S::zero);
            *e = e.clone() + a;
        }
        out.retain(|_, a| !a.is_zero());
        Ok(MonPolynomial { monoid: monoid.clone(), terms: out })
    }

    pub fn zero(monoid: &AffineMonoid) -> Self {
        MonPolynomial { monoid: monoid.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(monoid: &AffineMonoid, p: Vector) -> Result<Self> {
        MonPolynomial::new(monoid, [(p, S::one())])
    }

    pub fn monoid(&self) -> &AffineMonoid {
        &self.monoid
    }

    pub fn terms(&self) -> &BTreeMap<Vector, S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_monoid(&self, other: &Self) -> Result<()> {
        if self.monoid != other.monoid {
            return Err(Error::Incompatible("polynomials over different monoids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_monoid(other)?;
        let terms = self.terms.iter().chain(&other.terms).map(|(p, a)| (p.clone(), a.clone()));
        MonPolynomial::new(&self.monoid, terms)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_monoid(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                terms.push((add_vec(p, q), a.clone() * b.clone()));
            }
        }
        MonPolynomial::new(&self.monoid, terms)
    }
}

/// `F = Σ a_{m,p} χ^m ⊗ χ^p ∈ k[P^gp] ⊗ k[P]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPolynomial<S> {
    monoid: AffineMonoid,
    terms: BTreeMap<(Vector, Vector), S>,
}

impl<S: Scalar> BiPolynomial<S> {
    pub fn new(monoid: &AffineMonoid, terms: impl IntoIterator<Item = ((Vector, Vector), S)>) -> Result<Self> {
        let mut out: BTreeMap<(Vector, Vector), S> = BTreeMap::new();
        for ((m, p), a) in terms {
            if m.len() != monoid.rank() {
                return Err(Error::Dimension(format!("character of length {} in rank {}", m.len(), monoid.rank())));
            }
            check_exponent(monoid, &p)?;
            let e = out.entry((m, p)).or_insert_with(S::zero);
            *e = e.clone() + a;
        }
        out.retain(|_, a| !a.is_zero());
        Ok(BiPolynomial { monoid: monoid.clone(), terms: out })
    }

    pub fn monoid(&self) -> &AffineMonoid {
        &self.monoid
    }

    pub fn terms(&self) -> &BTreeMap<(Vector, Vector), S> {
        &self.terms
    }

    /// The unique `f_m` with `F = Σ_m χ^m ⊗ f_m`.
    pub fn components(&self) -> BTreeMap<Vector, MonPolynomial<S>> {
        let mut out: BTreeMap<Vector, MonPolynomial<S>> = BTreeMap::new();
        for ((m, p), a) in &self.terms {
            out.entry(m.clone())
                .or_insert_with(|| MonPolynomial::zero(&self.monoid))
                .terms
                .insert(p.clone(), a.clone());
        }
        out
    }
}

/// A point `χ^p ↦ c(p) s^{u(p)}`; `c` is stored by its values on the Hermite
/// basis of the face group `(P ∖ u⁻¹(∞))^gp`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcPoint<S> {
    exponents: ExtendedConePoint<S>,
    basis: Vec<Vector>,
    coeffs: Vec<S>,
}

impl<S: Scalar> ArcPoint<S> {
    pub fn new(exponents: ExtendedConePoint<S>, coeffs: Vec<S>) -> Result<Self> {
        let basis = face_basis(&exponents);
        if coeffs.len() != basis.len() {
            return Err(Error::InvalidPoint(format!(
                "{} coefficients for a face lattice of rank {}",
                coeffs.len(),
                basis.len()
            )));
        }
        if coeffs.iter().any(|c| c.is_zero()) {
            return Err(Error::InvalidPoint("coefficients must be nonzero".into()));
        }
        Ok(ArcPoint { exponents, basis, coeffs })
    }

    /// `c ≡ 1`: the arc whose seminorm agrees with `J_P(u)` on monomials.
    pub fn unit(exponents: ExtendedConePoint<S>) -> Self {
        let basis = face_basis(&exponents);
        let coeffs = vec![S::one(); basis.len()];
        ArcPoint { exponents, basis, coeffs }
    }

    pub fn monoid(&self) -> &AffineMonoid {
        self.exponents.monoid()
    }

    pub fn exponents(&self) -> &ExtendedConePoint<S> {
        &self.exponents
    }

    /// Basis of the face group the coefficients are stored on.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// `c(p)` for `p` in the face group.
    pub fn coefficient(&self, p: &[BigInt]) -> Option<S> {
        let k = lattice::lattice_membership(&self.basis, p).ok().flatten()?;
        let mut out = S::one();
        for (e, c) in k.iter().zip(&self.coeffs) {
            let n = e.abs().to_usize().expect("exponent fits in usize");
            let f = num_traits::pow(c.clone(), n);
            out = if e.is_negative() { out / f } else { out * f };
        }
        Some(out)
    }

    /// Image under `Spec P -> Spec Q` for `h: Q -> P`.
    pub fn pushforward(&self, h: &MonoidHom) -> Result<ArcPoint<S>> {
        let u = crate::conecomplex::pullback_point(&self.exponents, h)?;
        let basis = face_basis(&u);
        let coeffs = basis
            .iter()
            .map(|b| self.coefficient(&h.apply(b)).expect("face maps into face"))
            .collect();
        ArcPoint::new(u, coeffs)
    }
}

fn face_basis<S: Scalar>(u: &ExtendedConePoint<S>) -> Vec<Vector> {
    lattice::hermite_basis(u.monoid().rank(), &u.face().generators(u.monoid()))
}

/// The Gauss point `J_P(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussPoint<S>(pub ExtendedConePoint<S>);

impl<S: Scalar> GaussPoint<S> {
    pub fn valuation(&self, f: &MonPolynomial<S>) -> Result<LogValue<S>> {
        gauss_valuation(&self.0, f)
    }
}

fn check_monoid(a: &AffineMonoid, b: &AffineMonoid) -> Result<()> {
    if a != b {
        return Err(Error::Incompatible("point and polynomial live on different monoids".into()));
    }
    Ok(())
}

/// `−log J_P(u)(f) = min_{p ∈ supp f} u(p)`.
pub fn gauss_valuation<S: Scalar>(u: &ExtendedConePoint<S>, f: &MonPolynomial<S>) -> Result<LogValue<S>> {
    check_monoid(u.monoid(), f.monoid())?;
    Ok(f.terms.keys().map(|p| u.eval_cone(p)).fold(ExtendedNonneg::Infinity, ExtendedNonneg::min))
}

/// Order in `s` of `Σ a_p c(p) s^{u(p)}` after cancellation.
pub fn arc_valuation<S: Scalar>(x: &ArcPoint<S>, f: &MonPolynomial<S>) -> Result<LogValue<S>> {
    check_monoid(x.monoid(), f.monoid())?;
    // exponent -> summed coefficient
    let mut series: Vec<(S, S)> = Vec::new();
    for (p, a) in &f.terms {
        let ExtendedNonneg::Finite(e) = x.exponents.eval_cone(p) else { continue };
        let c = a.clone() * x.coefficient(p).expect("finite exponent lies in the face group");
        match series.iter_mut().find(|(k, _)| *k == e) {
            Some(slot) => slot.1 = slot.1.clone() + c,
            None => series.push((e, c)),
        }
    }
    Ok(series
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, _)| ExtendedNonneg::Finite(e))
        .fold(ExtendedNonneg::Infinity, ExtendedNonneg::min))
}

/// `p ↦ −log |χ^p|_x` on the generators.
pub fn trop_point<S: Scalar>(x: &ArcPoint<S>) -> Result<ExtendedConePoint<S>> {
    let p = x.monoid();
    let values = p
        .generators()
        .iter()
        .map(|g| arc_valuation(x, &MonPolynomial::monomial(p, g.clone())?))
        .collect::<Result<Vec<_>>>()?;
    ExtendedConePoint::from_values(p, values)
}

/// `J_P(u)`.
pub fn gauss_point<S: Scalar>(u: &ExtendedConePoint<S>) -> GaussPoint<S> {
    GaussPoint(u.clone())
}

/// `trop J_P(u)`, computed from the Gauss seminorm of monomials.
pub fn trop_gauss<S: Scalar>(g: &GaussPoint<S>) -> Result<ExtendedConePoint<S>> {
    let p = g.0.monoid();
    let values = p
        .generators()
        .iter()
        .map(|m| g.valuation(&MonPolynomial::monomial(p, m.clone())?))
        .collect::<Result<Vec<_>>>()?;
    ExtendedConePoint::from_values(p, values)
}

/// `p_P(x) = J_P(trop x)`.
pub fn retract<S: Scalar>(x: &ArcPoint<S>) -> Result<GaussPoint<S>> {
    Ok(GaussPoint(trop_point(x)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pullback {
    /// `π♯: χ^p ↦ 1 ⊗ χ^p`.
    Projection,
    /// `μ♯: χ^p ↦ χ^p ⊗ χ^p`.
    Action,
}

pub fn pullback<S: Scalar>(f: &MonPolynomial<S>, which: Pullback) -> BiPolynomial<S> {
    let zero = vec![BigInt::zero(); f.monoid.rank()];
    let terms = f.terms.iter().map(|(p, a)| {
        let m = match which {
            Pullback::Projection => zero.clone(),
            Pullback::Action => p.clone(),
        };
        ((m, p.clone()), a.clone())
    });
    BiPolynomial::new(&f.monoid, terms).expect("termwise image of a valid polynomial")
}

/// `−log |F|_{η⊗̂x} = min_m −log |f_m|_x`.
pub fn eta_tensor_valuation<S: Scalar>(x: &ArcPoint<S>, f: &BiPolynomial<S>) -> Result<LogValue<S>> {
    check_monoid(x.monoid(), f.monoid())?;
    let mut out = ExtendedNonneg::Infinity;
    for fm in f.components().values() {
        out = out.min(arc_valuation(x, fm)?);
    }
    Ok(out)
}

/// `trop` of an arc on chart `chart`, as a point of `Σ̄_F`.
pub fn trop_fan_point<S: Scalar>(fan: &KatoFan, chart: usize, x: &ArcPoint<S>) -> Result<ComplexPoint<S>> {
    if chart >= fan.charts().len() {
        return Err(Error::OutOfRange(format!("chart {chart}")));
    }
    ComplexPoint::new(fan, chart, trop_point(x)?)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuotientReport {
    pub seed: u64,
    pub points: usize,
    pub polynomials: usize,
    /// Evaluations of both pullback identities.
    pub lemma_checks: usize,
    pub unit_checks: usize,
    /// Classes of the relation `x ~ p_P(x)` among the samples.
    pub classes: usize,
    pub trop_fibers: usize,
    pub coequalizer_classes: usize,
    /// Sorted.
    pub counterexamples: Vec<String>,
}

impl QuotientReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn class_ids<T, F: Fn(&T, &T) -> bool>(items: &[T], same: F) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    let mut ids = Vec::with_capacity(items.len());
    for (i, it) in items.iter().enumerate() {
        match reps.iter().position(|&r| same(&items[r], it)) {
            Some(k) => ids.push(k),
            None => {
                ids.push(reps.len());
                reps.push(i);
            }
        }
    }
    ids
}

fn union_find_root(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Point-level check that `Spec k[P]^an` modulo the torus action (the
/// coequalizer of `π` and `μ`) is `σ̄_P`, via `trop`.
pub fn quotient_check<S: Scalar>(
    p: &AffineMonoid,
    points: &[ArcPoint<S>],
    polys: &[MonPolynomial<S>],
    seed: u64,
) -> Result<QuotientReport> {
    let fan = spec_fan(p)?;
    let groupoid = KatoGroupoid::trivial(&fan);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = QuotientReport { seed, points: points.len(), polynomials: polys.len(), ..Default::default() };
    let mut bad = Vec::new();

    let mut trops = Vec::with_capacity(points.len());
    let mut reps = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        check_monoid(x.monoid(), p)?;
        let t = trop_point(x)?;
        let r = retract(x)?;
        // (a) the two pullbacks along η⊗̂x give x and p_P(x)
        for (j, f) in polys.iter().enumerate() {
            check_monoid(f.monoid(), p)?;
            let direct = arc_valuation(x, f)?;
            let via_pi = eta_tensor_valuation(x, &pullback(f, Pullback::Projection))?;
            let via_mu = eta_tensor_valuation(x, &pullback(f, Pullback::Action))?;
            let gauss = r.valuation(f)?;
            if via_pi != direct {
                bad.push(format!("point {i}, poly {j}: eta∘pi = {via_pi}, arc = {direct}"));
            }
            if via_mu != gauss {
                bad.push(format!("point {i}, poly {j}: eta∘mu = {via_mu}, gauss∘retract = {gauss}"));
            }
            if gauss > direct {
                bad.push(format!("point {i}, poly {j}: gauss {gauss} exceeds arc {direct}"));
            }
            rep.lemma_checks += 1;
        }
        // (c) characters are units
        for _ in 0..3 {
            let m: Vector = (0..p.rank()).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect();
            let unit = BiPolynomial::new(p, [((m.clone(), vec![BigInt::zero(); p.rank()]), S::one())])?;
            let v = eta_tensor_valuation(x, &unit)?;
            if !v.is_zero() {
                bad.push(format!("point {i}: |chi^{m:?} (x) 1| has value {v}"));
            }
            rep.unit_checks += 1;
        }
        trops.push(t);
        reps.push(r);
    }

    // (b) x ~ p_P(x) generates the identification; compare with trop fibers
    // and with coequalizer classes in Σ̄
    let mut nodes: Vec<ArcPoint<S>> = points.to_vec();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    for (i, r) in reps.iter().enumerate() {
        let g = ArcPoint::unit(r.0.clone());
        let k = match nodes.iter().position(|n| *n == g) {
            Some(k) => k,
            None => {
                nodes.push(g);
                parent.push(parent.len());
                nodes.len() - 1
            }
        };
        let (a, b) = (union_find_root(&mut parent, i), union_find_root(&mut parent, k));
        parent[a] = b;
    }
    let roots: Vec<usize> = (0..points.len()).map(|i| union_find_root(&mut parent, i)).collect();
    let relation = class_ids(&roots, |a, b| a == b);
    let fibers = class_ids(&trops, |a, b| a == b);
    let coeq_reps = points
        .iter()
        .map(|x| Ok(coequalize(&groupoid, &trop_fan_point(&fan, 0, x)?)?.representative))
        .collect::<Result<Vec<_>>>()?;
    let coeq = class_ids(&coeq_reps, |a, b| a == b);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (r, t, c) = (relation[i] == relation[j], fibers[i] == fibers[j], coeq[i] == coeq[j]);
            if r != t || t != c {
                bad.push(format!(
                    "points {i} and {j}: identified {r}, same trop {t}, same coequalizer class {c}"
                ));
            }
        }
    }
    rep.classes = relation.iter().max().map_or(0, |m| m + 1);
    rep.trop_fibers = fibers.iter().max().map_or(0, |m| m + 1);
    rep.coequalizer_classes = coeq.iter().max().map_or(0, |m| m + 1);
    bad.sort();
    rep.counterexamples = bad;
    Ok(rep)
}
