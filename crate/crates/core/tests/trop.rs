use katofan::conecomplex::{complex_points_equal, pullback_point, reduction_map, structure_map, ExtendedConePoint, ExtendedNonneg};
use katofan::katofan::from_toric_fan;
use katofan::monoid::{faces, sharp_localize, AffineMonoid, Vector};
use katofan::trop::{
    arc_valuation, eta_tensor_valuation, gauss_point, gauss_valuation, pullback, quotient_check, retract, trop_fan_point,
    trop_gauss, trop_point, ArcPoint, BiPolynomial, MonPolynomial, Pullback,
};
use katofan::verify::{random_arc, random_cone_point, random_element, random_fs_monoid, random_polynomial};
use katofan::{ExtendedValue, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn v(x: &[i64]) -> Vector {
    x.iter().map(|&a| BigInt::from(a)).collect()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn fin(n: i64, d: i64) -> ExtendedValue {
    ExtendedNonneg::Finite(q(n, d))
}

const INF: ExtendedValue = ExtendedNonneg::Infinity;

fn poly(p: &AffineMonoid, terms: &[(&[i64], i64)]) -> MonPolynomial<Rational> {
    MonPolynomial::new(p, terms.iter().map(|(e, a)| (v(e), q(*a, 1)))).unwrap()
}

fn arc(p: &AffineMonoid, u: Vec<ExtendedValue>, c: Vec<Rational>) -> ArcPoint<Rational> {
    ArcPoint::new(ExtendedConePoint::from_values(p, u).unwrap(), c).unwrap()
}

/// Values on N² given as `u(e₁), u(e₂)`.
fn n2(a: ExtendedValue, b: ExtendedValue) -> Vec<ExtendedValue> {
    // canonical generator order is e₂, e₁
    vec![b, a]
}

#[test]
fn valuations_on_the_plane() {
    let p = AffineMonoid::free(2);
    // f = χ^{e₁} + χ^{e₂} at u = (1, 2)
    let f = poly(&p, &[(&[1, 0], 1), (&[0, 1], 1)]);
    let u = ExtendedConePoint::from_values(&p, n2(fin(1, 1), fin(2, 1))).unwrap();
    assert_eq!(gauss_valuation(&u, &f).unwrap(), fin(1, 1));
    // the arc (t, t): cancellation in χ^{e₁} − χ^{e₂}
    let x = arc(&p, n2(fin(1, 1), fin(1, 1)), vec![q(1, 1), q(1, 1)]);
    let g = poly(&p, &[(&[1, 0], 1), (&[0, 1], -1)]);
    assert_eq!(arc_valuation(&x, &g).unwrap(), INF);
    assert_eq!(retract(&x).unwrap().valuation(&g).unwrap(), fin(1, 1));
    // off the boundary the arc sees the surviving term
    let y = arc(&p, n2(fin(1, 1), INF), vec![q(5, 1)]);
    assert_eq!(arc_valuation(&y, &g).unwrap(), fin(1, 1));
    assert_eq!(trop_point(&y).unwrap().values(), &n2(fin(1, 1), INF)[..]);
}

#[test]
fn retraction_is_not_an_isometry() {
    // the evaluation point at χ = 1 on Spec N kills 1 − χ; its retraction does not
    let n = AffineMonoid::free(1);
    let ev = arc(&n, vec![fin(0, 1)], vec![q(1, 1)]);
    let f = poly(&n, &[(&[0], 1), (&[1], -1)]);
    assert_eq!(arc_valuation(&ev, &f).unwrap(), INF);
    assert_eq!(retract(&ev).unwrap().valuation(&f).unwrap(), fin(0, 1));
    // both are on the same fiber of trop
    assert_eq!(trop_point(&ev).unwrap(), trop_gauss(&retract(&ev).unwrap()).unwrap());
}

#[test]
fn pullbacks_through_eta() {
    let n = AffineMonoid::free(1);
    let f = poly(&n, &[(&[0], 1), (&[1], -1)]);
    let pi = pullback(&f, Pullback::Projection);
    let mu = pullback(&f, Pullback::Action);
    assert_eq!(pi.terms().len(), 2);
    assert_eq!(mu.components().len(), 2);
    let ev = arc(&n, vec![fin(0, 1)], vec![q(1, 1)]);
    assert_eq!(eta_tensor_valuation(&ev, &pi).unwrap(), INF);
    assert_eq!(eta_tensor_valuation(&ev, &mu).unwrap(), fin(0, 1));
    let other = AffineMonoid::free(2);
    let foreign = BiPolynomial::new(&other, [((v(&[0, 0]), v(&[0, 0])), q(1, 1))]).unwrap();
    assert!(eta_tensor_valuation(&ev, &foreign).is_err());
}

#[test]
fn projective_line() {
    let fan = from_toric_fan(1, &[vec![v(&[1])], vec![v(&[-1])]]).unwrap();
    let (c0, c1) = (&fan.charts()[0], &fan.charts()[1]);
    // t^{-3} on one chart is t^3 on the other
    let a = trop_fan_point(&fan, 0, &arc(c0, vec![fin(3, 1)], vec![q(2, 1)])).unwrap();
    let b = trop_fan_point(&fan, 1, &arc(c1, vec![fin(3, 1)], vec![q(1, 2)])).unwrap();
    assert!(!complex_points_equal(&fan, &a, &b).unwrap());
    let o0 = trop_fan_point(&fan, 0, &arc(c0, vec![fin(0, 1)], vec![q(7, 1)])).unwrap();
    let o1 = trop_fan_point(&fan, 1, &arc(c1, vec![fin(0, 1)], vec![q(-1, 1)])).unwrap();
    assert!(complex_points_equal(&fan, &o0, &o1).unwrap());
    assert!(trop_fan_point(&fan, 5, &arc(c0, vec![fin(0, 1)], vec![q(1, 1)])).is_err());
}

#[test]
fn quotient_check_on_the_plane() {
    let p = AffineMonoid::free(2);
    let pts = vec![
        arc(&p, n2(fin(1, 1), fin(1, 1)), vec![q(1, 1), q(1, 1)]),
        arc(&p, n2(fin(1, 1), fin(1, 1)), vec![q(1, 1), q(2, 1)]),
        arc(&p, n2(fin(0, 1), INF), vec![q(3, 1)]),
        arc(&p, n2(INF, INF), vec![]),
    ];
    let polys = vec![poly(&p, &[(&[1, 0], 1), (&[0, 1], -1)]), poly(&p, &[(&[0, 0], 1), (&[1, 0], -3)])];
    let rep = quotient_check(&p, &pts, &polys, 3).unwrap();
    assert!(rep.passed(), "{:?}", rep.counterexamples);
    assert_eq!(rep.classes, 3);
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuations_are_multiplicative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_fs_monoid(&mut r, 2, 3);
        let (f, g) = (random_polynomial(&mut r, &p, 3), random_polynomial(&mut r, &p, 3));
        let fg = f.mul(&g).unwrap();
        let u = random_cone_point(&mut r, &p);
        prop_assert_eq!(gauss_valuation(&u, &fg).unwrap(), gauss_valuation(&u, &f).unwrap() + gauss_valuation(&u, &g).unwrap());
        let x = random_arc(&mut r, &p);
        prop_assert_eq!(arc_valuation(&x, &fg).unwrap(), arc_valuation(&x, &f).unwrap() + arc_valuation(&x, &g).unwrap());
    }

    #[test]
    fn valuations_are_ultrametric_and_bounded(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_fs_monoid(&mut r, 2, 3);
        let (f, g) = (random_polynomial(&mut r, &p, 3), random_polynomial(&mut r, &p, 3));
        let sum = f.add(&g).unwrap();
        let x = random_arc(&mut r, &p);
        let u = trop_point(&x).unwrap();
        for val in [
            |x: &ArcPoint<Rational>, _: &ExtendedConePoint<Rational>, f: &MonPolynomial<Rational>| arc_valuation(x, f).unwrap(),
            |_: &ArcPoint<Rational>, u: &ExtendedConePoint<Rational>, f: &MonPolynomial<Rational>| gauss_valuation(u, f).unwrap(),
        ] {
            let (a, b, s) = (val(&x, &u, &f), val(&x, &u, &g), val(&x, &u, &sum));
            prop_assert!(s >= a.clone().min(b));
            // |f| ≤ 1 on the closed unit ball
            prop_assert!(a >= fin(0, 1) || a == INF);
        }
        // Gauss norms dominate arc norms, and agree on monomials
        prop_assert!(gauss_valuation(&u, &f).unwrap() <= arc_valuation(&x, &f).unwrap());
        let m = MonPolynomial::monomial(&p, random_element(&mut r, &p, 3)).unwrap();
        prop_assert_eq!(gauss_valuation(&u, &m).unwrap(), arc_valuation(&x, &m).unwrap());
    }

    #[test]
    fn trop_retracts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_fs_monoid(&mut r, 3, 4);
        let u = random_cone_point(&mut r, &p);
        prop_assert_eq!(trop_gauss(&gauss_point(&u)).unwrap(), u);
        let x = random_arc(&mut r, &p);
        let j = retract(&x).unwrap();
        prop_assert_eq!(trop_gauss(&j).unwrap(), trop_point(&x).unwrap());
        prop_assert_eq!(retract(&ArcPoint::unit(j.0.clone())).unwrap(), j);
    }

    #[test]
    fn eta_pullbacks(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_fs_monoid(&mut r, 2, 3);
        let x = random_arc(&mut r, &p);
        let f = random_polynomial(&mut r, &p, 4);
        prop_assert_eq!(eta_tensor_valuation(&x, &pullback(&f, Pullback::Projection)).unwrap(), arc_valuation(&x, &f).unwrap());
        prop_assert_eq!(
            eta_tensor_valuation(&x, &pullback(&f, Pullback::Action)).unwrap(),
            retract(&x).unwrap().valuation(&f).unwrap()
        );
    }

    #[test]
    fn structure_and_reduction_from_arcs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_fs_monoid(&mut r, 3, 4);
        let x = random_arc(&mut r, &p);
        let u = trop_point(&x).unwrap();
        // ρ: generators the arc kills; r: generators it sends into the open disc
        let dead: Vec<usize> = (0..p.generators().len())
            .filter(|&i| x.coefficient(&p.generators()[i]).is_none())
            .collect();
        prop_assert_eq!(structure_map(&u), dead);
        let small: Vec<usize> = (0..p.generators().len())
            .filter(|&i| arc_valuation(&x, &MonPolynomial::monomial(&p, p.generators()[i].clone()).unwrap()).unwrap() > fin(0, 1))
            .collect();
        prop_assert_eq!(reduction_map(&u), small);
    }

    #[test]
    fn trop_commutes_with_face_localization(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_fs_monoid(&mut r, 3, 4);
        let f = faces(&p).choose(&mut r).unwrap().clone();
        let loc = sharp_localize(&p, &f).unwrap();
        let x = random_arc(&mut r, &loc.monoid);
        let y = x.pushforward(&loc.hom).unwrap();
        prop_assert_eq!(trop_point(&y).unwrap(), pullback_point(&trop_point(&x).unwrap(), &loc.hom).unwrap());
        let g = random_polynomial(&mut r, &p, 3);
        let u = trop_point(&y).unwrap();
        prop_assert!(gauss_valuation(&u, &g).unwrap() <= arc_valuation(&y, &g).unwrap());
    }
}
