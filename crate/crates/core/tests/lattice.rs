use katofan::lattice::{
    determinant, hermite_basis, kernel_basis, lattice_membership, smith_normal_form, Matrix, SmithForm,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn big(rows: &[&[i64]]) -> Matrix<BigInt> {
    let cols = rows.first().map_or(0, |r| r.len());
    Matrix::from_rows(cols, &rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect::<Vec<_>>())
        .unwrap()
}

fn v(x: &[i64]) -> Vec<BigInt> {
    x.iter().map(|&a| BigInt::from(a)).collect()
}

/// Checks everything a Smith form promises and returns the diagonal.
fn check_smith(m: &Matrix<BigInt>, s: &SmithForm<BigInt>) -> Vec<BigInt> {
    assert_eq!(&(&s.u * m) * &s.v, s.d, "U M V = D");
    assert!(determinant(&s.u).abs().is_one(), "U unimodular");
    assert!(determinant(&s.v).abs().is_one(), "V unimodular");
    let (r, c) = (s.d.rows(), s.d.cols());
    for i in 0..r {
        for j in 0..c {
            if i != j {
                assert!(s.d.get(i, j).is_zero(), "off-diagonal entry at ({i},{j})");
            }
        }
    }
    let diag: Vec<BigInt> = (0..r.min(c)).map(|i| s.d.get(i, i).clone()).collect();
    for w in diag.windows(2) {
        assert!(!w[0].is_negative());
        if w[0].is_zero() {
            assert!(w[1].is_zero(), "zeros come last");
        } else {
            assert!(w[1].is_multiple_of(&w[0]), "divisibility chain {diag:?}");
        }
    }
    diag
}

#[test]
fn smith_examples() {
    let m = big(&[&[2, 0], &[0, 3]]);
    assert_eq!(check_smith(&m, &smith_normal_form(&m)), v(&[1, 6]));

    let id = Matrix::<BigInt>::identity(3);
    let s = smith_normal_form(&id);
    assert_eq!(s.d, id);

    let row = big(&[&[2, 4]]);
    let s = smith_normal_form(&row);
    check_smith(&row, &s);
    assert_eq!(s.d, big(&[&[2, 0]]));
}

#[test]
fn smith_textbook_matrix() {
    // invariant factors by gcds of minors: d1 = 2, d1 d2 = 12, d1 d2 d3 = |det| = 144
    let m = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
    assert_eq!(determinant(&m).abs(), BigInt::from(144));
    assert_eq!(check_smith(&m, &smith_normal_form(&m)), v(&[2, 6, 12]));
}

#[test]
fn smith_over_machine_integers_agrees() {
    let m = Matrix::<i64>::from_rows(3, &[vec![4, 6, 2], vec![2, 8, 10], vec![6, 2, -2]]).unwrap();
    let s = smith_normal_form(&m);
    assert_eq!(&(&s.u * &m) * &s.v, s.d);
    let mb = big(&[&[4, 6, 2], &[2, 8, 10], &[6, 2, -2]]);
    let sb = smith_normal_form(&mb);
    let d: Vec<i64> = s.invariant_factors();
    let db: Vec<i64> = sb.invariant_factors().iter().map(|x| i64::try_from(x).unwrap()).collect();
    assert_eq!(d, db);
}

#[test]
fn kernel_examples() {
    assert_eq!(kernel_basis(&big(&[&[1, 1]])), vec![v(&[1, -1])]);
    assert!(kernel_basis(&Matrix::<BigInt>::identity(2)).is_empty());

    // brute force over the box: the kernel of [2, -3] is Z·(3, 2)
    let k = kernel_basis(&big(&[&[2, -3]]));
    assert_eq!(k.len(), 1);
    assert_eq!(k[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), v(&[3, 2]));
    for a in -5i64..=5 {
        for b in -5i64..=5 {
            let in_kernel = 2 * a - 3 * b == 0;
            let in_span = lattice_membership(&k, &v(&[a, b])).unwrap().is_some();
            assert_eq!(in_kernel, in_span, "({a},{b})");
        }
    }
}

#[test]
fn membership_examples() {
    let b = vec![v(&[2, 0]), v(&[0, 2])];
    assert_eq!(lattice_membership(&b, &v(&[2, 2])).unwrap(), Some(v(&[1, 1])));
    assert_eq!(lattice_membership(&b, &v(&[1, 0])).unwrap(), None);
    assert_eq!(lattice_membership(&[v(&[3, 2])], &v(&[6, 4])).unwrap(), Some(v(&[2])));
    assert!(lattice_membership(&b, &v(&[1, 2, 3])).is_err());
}

fn matrix_strategy() -> impl Strategy<Value = Matrix<BigInt>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-6i64..=6, r * c)
            .prop_map(move |data| Matrix::new(r, c, data.into_iter().map(BigInt::from).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_form_is_valid_and_row_order_free(m in matrix_strategy(), seed in any::<u64>()) {
        let d = check_smith(&m, &smith_normal_form(&m));
        // permuting rows leaves D unchanged
        let mut rows = m.to_rows();
        let n = rows.len();
        for i in (1..n).rev() {
            rows.swap(i, (seed as usize).wrapping_add(i * 7) % (i + 1));
        }
        let pm = Matrix::from_rows(m.cols(), &rows).unwrap();
        let pd = check_smith(&pm, &smith_normal_form(&pm));
        prop_assert_eq!(d, pd);
    }

    #[test]
    fn kernel_vectors_are_annihilated_and_recovered(m in matrix_strategy(), coeffs in proptest::collection::vec(-4i64..=4, 4)) {
        let k = kernel_basis(&m);
        prop_assert_eq!(k.len(), m.cols() - smith_normal_form(&m).rank());
        for b in &k {
            prop_assert!(m.mul_vec(b).iter().all(Zero::is_zero));
        }
        let c: Vec<BigInt> = coeffs.iter().take(k.len()).map(|&x| BigInt::from(x)).collect();
        let mut w = vec![BigInt::zero(); m.cols()];
        for (ci, b) in c.iter().zip(&k) {
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi += ci * bi;
            }
        }
        prop_assert_eq!(lattice_membership(&k, &w).unwrap(), Some(c));
    }

    #[test]
    fn hermite_basis_spans_the_same_lattice(m in matrix_strategy()) {
        let gens = m.to_rows();
        let h = hermite_basis(m.cols(), &gens);
        for g in &gens {
            prop_assert!(lattice_membership(&h, g).unwrap().is_some());
        }
        // each basis vector is an integer combination of the generators:
        // compare the lattices through their Smith invariants
        let hm = Matrix::from_rows(m.cols(), &h).unwrap_or_else(|_| Matrix::zeros(0, m.cols()));
        let a = smith_normal_form(&m).invariant_factors();
        let b = if h.is_empty() { vec![] } else { smith_normal_form(&hm).invariant_factors() };
        prop_assert_eq!(a, b);
        prop_assert_eq!(hermite_basis(m.cols(), &h), h);
    }
}
