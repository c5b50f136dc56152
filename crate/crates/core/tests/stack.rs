use std::collections::BTreeSet;

use katofan::katofan::{spec_fan, KatoFanMorphism};
use katofan::lattice::{factor_through, Matrix};
use katofan::monoid::{automorphisms, face_hull, faces, make_monoid, sharp_localize, AffineMonoid, Face, Vector};
use katofan::stack::{classifying_groupoid, twisted_product, GroupAction, KatoGroupoid, DEFAULT_MAX_ORBIT};
use katofan::verify::random_fs_monoid;
use katofan::IntMatrix;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn v(x: &[i64]) -> Vector {
    x.iter().map(|&a| BigInt::from(a)).collect()
}

fn mat(rows: &[&[i64]], cols: usize) -> IntMatrix {
    Matrix::from_rows(cols, &rows.iter().map(|r| v(r)).collect::<Vec<_>>()).unwrap()
}

fn swap() -> IntMatrix {
    mat(&[&[0, 1], &[1, 0]], 2)
}

#[test]
fn validation_reports() {
    let u = spec_fan(&AffineMonoid::free(2)).unwrap();
    let trivial = KatoGroupoid::trivial(&u);
    let rep = trivial.validate();
    assert!(rep.is_valid());
    assert!(rep.units.iter().all(Option::is_some));
    // every arrow composes with its own identity
    assert_eq!(rep.composition_witness.len(), u.points().len());

    let g = twisted_product(&GroupAction::new(AffineMonoid::free(2), vec![swap()], DEFAULT_MAX_ORBIT).unwrap()).unwrap();
    let rep = g.validate();
    assert!(rep.is_valid(), "{:?}", rep.violations);
    assert!(rep.s_strict && rep.t_strict && rep.surjective && rep.unit && rep.inverse && rep.composition);

    let n = spec_fan(&AffineMonoid::free(1)).unwrap();
    let twice = KatoFanMorphism::new(n.clone(), n.clone(), vec![(0, mat(&[&[2]], 1))]).unwrap();
    let rep = KatoGroupoid::new(twice.clone(), KatoFanMorphism::identity(&n)).unwrap().validate();
    assert!(rep.violations.iter().any(|v| v == "s not strict"));
    assert!(rep.t_strict);
    let rep = KatoGroupoid::new(KatoFanMorphism::identity(&n), twice).unwrap().validate();
    assert!(rep.violations.iter().any(|v| v == "t not strict"));

    // s and t must share source and target
    let other = KatoFanMorphism::identity(&u);
    assert!(KatoGroupoid::new(KatoFanMorphism::identity(&n), other).is_err());
}

#[test]
fn isotropy_of_the_swap() {
    let g = twisted_product(&GroupAction::new(AffineMonoid::free(2), vec![swap()], DEFAULT_MAX_ORBIT).unwrap()).unwrap();
    let u = g.u();
    let all = Face::new(vec![0, 1]);
    let closed = u.point_index(0, &Face::new(vec![])).unwrap();
    let generic = u.point_index(0, &all).unwrap();
    let iso = g.isotropy(closed).unwrap();
    assert_eq!(iso.iter().map(|(_, m)| m.clone()).collect::<Vec<_>>(), vec![Matrix::identity(2), swap()]);
    assert_eq!(g.isotropy(generic).unwrap().len(), 1);
    // the rays are exchanged, so each has trivial isotropy
    for f in [Face::new(vec![0]), Face::new(vec![1])] {
        let x = u.point_index(0, &f).unwrap();
        assert_eq!(g.isotropy(x).unwrap().len(), 1);
    }
}

#[test]
fn faithfulness() {
    for order in 1..=3 {
        let bg = classifying_groupoid(order).unwrap();
        assert!(bg.validate().is_valid());
        assert_eq!(bg.isotropy(0).unwrap().len(), order);
        assert_eq!(bg.faithful_monodromy().unwrap(), order == 1);
    }
    let g = twisted_product(&GroupAction::new(AffineMonoid::free(2), vec![swap()], DEFAULT_MAX_ORBIT).unwrap()).unwrap();
    assert!(g.faithful_monodromy().unwrap());
}

#[test]
fn automorphisms_of_a_cone() {
    // ⟨(1,0),(1,1),(1,2)⟩ has the reflection fixing (1,1)
    let p = make_monoid(2, &[v(&[1, 0]), v(&[1, 1]), v(&[1, 2])]).unwrap();
    let auts = automorphisms(&p).unwrap();
    assert_eq!(auts.len(), 2);
    let a = GroupAction::new(p.clone(), auts, DEFAULT_MAX_ORBIT).unwrap();
    let g = twisted_product(&a).unwrap();
    assert!(g.validate().is_valid());
    let closed = g.u().point_index(0, &Face::new(vec![])).unwrap();
    assert_eq!(g.isotropy(closed).unwrap().len(), 2);

    // a non-automorphism is rejected
    assert!(GroupAction::new(AffineMonoid::free(1), vec![mat(&[&[2]], 1)], DEFAULT_MAX_ORBIT).is_err());
    // as is a non-saturated monoid
    let cusp = make_monoid(1, &[v(&[2]), v(&[3])]).unwrap();
    assert!(GroupAction::new(cusp, vec![], DEFAULT_MAX_ORBIT).is_err());
}

#[test]
fn ineffective_near_a_point() {
    // S₃ on N³: the only invariant faces are 0 and N³, but a transposition
    // fixes the ray through the third coordinate pointwise near the point ⟨e₁, e₂⟩
    let n3 = AffineMonoid::free(3);
    let auts = automorphisms(&n3).unwrap();
    assert_eq!(auts.len(), 6);
    let a = GroupAction::new(n3.clone(), auts, DEFAULT_MAX_ORBIT).unwrap();
    assert_eq!(a.invariant_faces().len(), 2);
    let g = twisted_product(&a).unwrap();
    assert!(g.validate().is_valid());
    assert!(g.faithful_monodromy().unwrap());
    for f in faces(&n3) {
        let x = g.u().point_index(0, &f).unwrap();
        let expected = match f.len() {
            0 => 6,
            1 => 2,
            _ => 1,
        };
        assert_eq!(g.isotropy(x).unwrap().len(), expected, "face {f:?}");
    }
}

/// Distinct automorphisms of the sharp localization at `f` induced by the
/// elements fixing `f`.
fn induced_on(a: &GroupAction, f: &Face) -> BTreeSet<IntMatrix> {
    let p = a.monoid();
    let loc = sharp_localize(p, f).unwrap();
    a.elements()
        .iter()
        .filter(|g| {
            let images: Vec<Vector> = f.generators(p).iter().map(|x| g.mul_vec(x)).collect();
            face_hull(p, &images) == *f
        })
        .map(|g| factor_through(&(loc.hom.matrix() * g), loc.hom.matrix()).unwrap())
        .collect()
}

fn random_action(r: &mut ChaCha8Rng) -> GroupAction {
    let p = random_fs_monoid(r, 3, 4);
    let auts = automorphisms(&p).unwrap();
    let gens: Vec<IntMatrix> = auts.into_iter().filter(|_| r.gen_bool(0.5)).collect();
    GroupAction::new(p, gens, DEFAULT_MAX_ORBIT).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn twisted_products_are_groupoids(seed in any::<u64>()) {
        let a = random_action(&mut ChaCha8Rng::seed_from_u64(seed));
        let g = twisted_product(&a).unwrap();
        let rep = g.validate();
        prop_assert!(rep.is_valid(), "{:?}", rep.violations);
        prop_assert_eq!(g.r().charts().len(), a.elements().len());
        prop_assert!(g.faithful_monodromy().unwrap());
        // isotropy at a point is what the stabilizer induces on its local monoid
        for f in faces(a.monoid()) {
            let x = g.u().point_index(0, &f).unwrap();
            let iso: BTreeSet<IntMatrix> = g.isotropy(x).unwrap().into_iter().map(|(_, m)| m).collect();
            prop_assert_eq!(iso, induced_on(&a, &f));
        }
        let closed = g.u().point_index(0, &Face::new(vec![])).unwrap();
        prop_assert_eq!(g.isotropy(closed).unwrap().len(), a.elements().len());
    }

    #[test]
    fn the_group_is_closed(seed in any::<u64>()) {
        let a = random_action(&mut ChaCha8Rng::seed_from_u64(seed));
        let els: BTreeSet<&IntMatrix> = a.elements().iter().collect();
        prop_assert_eq!(els.len(), a.elements().len());
        prop_assert!(a.elements()[0].is_identity());
        for x in a.elements() {
            for y in a.elements() {
                prop_assert!(els.contains(&(x * y)));
            }
        }
    }
}
