use katofan::katofan::{fiber_product, from_toric_fan, spec_fan, KatoFan, KatoFanMorphism};
use katofan::lattice::Matrix;
use katofan::monoid::{faces, fs_pushout, make_monoid, AffineMonoid, MonoidHom, Vector};
use katofan::verify::{random_element, random_fs_monoid};
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

fn spec(p: &AffineMonoid) -> KatoFan {
    spec_fan(p).unwrap()
}

fn p1() -> KatoFan {
    from_toric_fan(1, &[vec![v(&[1])], vec![v(&[-1])]]).unwrap()
}

#[test]
fn affine_fans() {
    let n = spec(&AffineMonoid::free(1));
    assert_eq!(n.points().len(), 2);
    assert_eq!(n.generic_points().len(), 1);
    assert!(n.prime(n.generic_points()[0]).is_empty());

    let n2 = spec(&AffineMonoid::free(2));
    assert_eq!(n2.points().len(), 4);
    // diamond: the generic point specializes to everything, the closed point
    // is a specialization of everything, the two rays are incomparable
    let generic = n2.generic_points()[0];
    let closed = (0..4).find(|&x| n2.prime(x).len() == 2).unwrap();
    let rays: Vec<usize> = (0..4).filter(|&x| x != generic && x != closed).collect();
    for x in 0..4 {
        assert!(n2.specializes(generic, x));
        assert!(n2.specializes(x, closed));
    }
    assert!(!n2.specializes(rays[0], rays[1]) && !n2.specializes(rays[1], rays[0]));

    assert_eq!(spec(&AffineMonoid::zero()).points().len(), 1);
    assert!(spec_fan(&make_monoid(1, &[v(&[1]), v(&[-1])]).unwrap()).is_err());
    assert!(spec_fan(&make_monoid(1, &[v(&[2]), v(&[3])]).unwrap()).is_err());
}

#[test]
fn toric_fans() {
    let torus = from_toric_fan(1, &[vec![]]).unwrap();
    assert_eq!(torus.charts(), &[AffineMonoid::zero()]);
    assert_eq!(torus.points().len(), 1);

    let line = from_toric_fan(1, &[vec![v(&[1])]]).unwrap();
    assert_eq!(line.charts(), &[AffineMonoid::free(1)]);
    assert_eq!(line.points().len(), 2);

    let p = p1();
    assert_eq!(p.charts().len(), 2);
    assert_eq!(p.points().len(), 3);
    assert_eq!(p.generic_points().len(), 1);
    // the generic points of both charts are one point
    let generic_occurrences = p.occurrences(p.generic_points()[0]);
    assert_eq!(generic_occurrences.len(), 2);

    // the fan of A² has one point per cone
    let plane = from_toric_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
    assert_eq!(plane.points().len(), 4);
    // P² has 7 cones
    let p2 = from_toric_fan(
        2,
        &[
            vec![v(&[1, 0]), v(&[0, 1])],
            vec![v(&[0, 1]), v(&[-1, -1])],
            vec![v(&[-1, -1]), v(&[1, 0])],
        ],
    )
    .unwrap();
    assert_eq!(p2.points().len(), 7);
}

#[test]
fn fiber_product_examples() {
    let n = AffineMonoid::free(1);
    let (fan_n, pt) = (spec(&n), spec(&AffineMonoid::zero()));
    let to_pt = KatoFanMorphism::new(fan_n.clone(), pt, vec![(0, Matrix::zeros(1, 0))]).unwrap();
    let fp = fiber_product(&to_pt, &to_pt).unwrap();
    assert_eq!(fp.fan.charts(), &[AffineMonoid::free(2)]);

    let id = KatoFanMorphism::identity(&p1());
    let fp = fiber_product(&KatoFanMorphism::identity(&fan_n), &KatoFanMorphism::identity(&fan_n)).unwrap();
    assert_eq!(fp.fan, fan_n);
    // over a non-affine base the product is not computed
    assert!(fiber_product(&id, &id).is_err());

    let times = |k: i64| KatoFanMorphism::new(fan_n.clone(), fan_n.clone(), vec![(0, mat(&[&[k]], 1))]).unwrap();
    let fp = fiber_product(&times(2), &times(3)).unwrap();
    assert_eq!(fp.fan.charts(), &[n]);
}

#[test]
fn strictness() {
    let n2 = spec(&AffineMonoid::free(2));
    assert!(KatoFanMorphism::identity(&n2).is_strict());

    // the open immersion of the chart D(e₁): N² -> N, e₁ ↦ 0, e₂ ↦ 1
    let n = spec(&AffineMonoid::free(1));
    let open = KatoFanMorphism::new(n.clone(), n2, vec![(0, mat(&[&[0, 1]], 2))]).unwrap();
    assert!(open.is_strict());
    assert!(!open.is_surjective());

    let double = KatoFanMorphism::new(n.clone(), n, vec![(0, mat(&[&[2]], 1))]).unwrap();
    assert!(!double.is_strict());
}

#[test]
fn gluing_soundness_on_the_projective_line() {
    let p = p1();
    for x in 0..p.points().len() {
        let occ = p.occurrences(x);
        let m = p.local_monoid(x);
        for o in &occ {
            // each occurrence's local monoid is isomorphic to the representative's
            let iso = p.stalk_iso(x, o).unwrap();
            let local = &p.local(o).monoid;
            let h = MonoidHom::new(iso.clone(), local.clone(), m.clone()).unwrap();
            assert!(h.is_iso());
            assert_eq!(p.point_index(o.chart, &o.face), Some(x));
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Spec P -> Spec N^k` given by `k` random elements of `P`.
fn random_map_to_free(r: &mut ChaCha8Rng, p: &AffineMonoid, k: usize) -> KatoFanMorphism {
    let cols: Vec<Vector> = (0..k).map(|_| random_element(r, p, 2)).collect();
    let m = Matrix::from_columns(p.rank(), &cols).unwrap();
    KatoFanMorphism::new(spec(p), spec(&AffineMonoid::free(k)), vec![(0, m)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spec_points_are_faces(seed in any::<u64>()) {
        let p = random_fs_monoid(&mut rng(seed), 3, 5);
        let f = spec(&p);
        prop_assert_eq!(f.points().len(), faces(&p).len());
        // specialization is a partial order
        let n = f.points().len();
        for a in 0..n {
            prop_assert!(f.specializes(a, a));
            for b in 0..n {
                if a != b && f.specializes(a, b) {
                    prop_assert!(!f.specializes(b, a));
                }
            }
        }
    }

    #[test]
    fn affine_fiber_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(0..=2);
        let p = random_fs_monoid(&mut r, 2, 3);
        let q = random_fs_monoid(&mut r, 2, 3);
        let f = random_map_to_free(&mut r, &p, k);
        let g = random_map_to_free(&mut r, &q, k);
        let fp = fiber_product(&f, &g).unwrap();

        // Spec of the sharpened fs pushout
        let po = fs_pushout(&f.chart_maps()[0].hom, &g.chart_maps()[0].hom).unwrap();
        prop_assert_eq!(fp.fan.charts(), &[po.monoid.sharpen().0]);

        // the square commutes on points
        for x in 0..fp.fan.points().len() {
            prop_assert_eq!(f.map_point(fp.first.map_point(x)), g.map_point(fp.second.map_point(x)));
        }
    }
}
