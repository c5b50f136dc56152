use std::path::{Path, PathBuf};

use katofan::cli::doc::{emit, parse_document, ArcPointDoc, Carrier, Document, PointDoc, ToricDoc};
use katofan::cli::{execute, MAX_ORBIT_ENV};
use katofan::conecomplex::ExtendedConePoint;
use katofan::katofan::{fiber_product, from_toric_fan, spec_fan, KatoFanMorphism};
use katofan::lattice::Matrix;
use katofan::monoid::{make_monoid, AffineMonoid, MonoidHom, Vector};
use katofan::stack::{classifying_groupoid, twisted_product, GroupAction, DEFAULT_MAX_ORBIT};
use katofan::trop::ArcPoint;
use katofan::verify::{random_arc, random_cone_point, random_fs_monoid, random_polynomial};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

fn v(x: &[i64]) -> Vector {
    x.iter().map(|&a| BigInt::from(a)).collect()
}

fn swap_action() -> GroupAction {
    let swap = Matrix::from_rows(2, &[v(&[0, 1]), v(&[1, 0])]).unwrap();
    GroupAction::new(AffineMonoid::free(2), vec![swap], DEFAULT_MAX_ORBIT).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> (Value, i32) {
    let (out, code) = execute(args.iter().copied());
    let value = if out.is_empty() { Value::Null } else { serde_json::from_str(&out).unwrap() };
    (value, code)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn reload(doc: &Document) -> Document {
    parse_document(&emit(doc), DEFAULT_MAX_ORBIT).unwrap()
}

#[test]
fn command_examples() {
    let dir = TempDir::new().unwrap();
    let m23 = write(&dir, "m23.json", r#"{"kind":"monoid","version":"1","rank":1,"generators":[[2],[3]]}"#);
    let (out, code) = run(&["monoid", "saturate", p(&m23)]);
    assert_eq!(code, 0);
    assert_eq!(out["kind"], "monoid");
    assert_eq!(out["generators"], json!([[1]]));

    let bg2 = write(&dir, "bg2.json", &emit(&Document::Groupoid(classifying_groupoid(2).unwrap())));
    let (out, code) = run(&["stack", "faithful", p(&bg2)]);
    assert_eq!((out["faithful_monodromy"].clone(), code), (json!(false), 0));

    let pt = write(&dir, "pt.json", &emit(&Document::Point(PointDoc {
        carrier: Carrier::Monoid(AffineMonoid::free(1)),
        chart: 0,
        infinity_prime: vec![0],
        finite_part: vec![],
    })));
    let (out, code) = run(&["cone", "rho", p(&pt)]);
    assert_eq!((out["prime"].clone(), code), (json!([0]), 0));
    let (out, _) = run(&["cone", "r", p(&pt)]);
    assert_eq!(out["prime"], json!([0]));

    let (out, code) = run(&["cone", "eval", p(&pt), "--at", "[0]"]);
    assert_eq!(code, 0);
    assert_eq!(out["value"], "0");

    let action = write(&dir, "swap.json", &emit(&Document::Action(swap_action())));
    let (out, code) = run(&["stack", "validate", p(&action)]);
    assert_eq!((out["valid"].clone(), code), (json!(true), 0));
    let (out, _) = run(&["stack", "faithful", p(&action)]);
    assert_eq!(out["faithful_monodromy"], json!(true));

    let toric = write(&dir, "p1.json", r#"{"kind":"toric","version":"1","dim":1,"cones":[[[1]],[[-1]]]}"#);
    let (out, code) = run(&["fan", "from-toric", p(&toric)]);
    assert_eq!(code, 0);
    assert_eq!(out["charts"].as_array().unwrap().len(), 2);

    let (out, code) = run(&["check", "--suite", "toric", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out["failures"], json!([]));
}

#[test]
fn load_errors() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"kind":"monoid","version":"1","generators":[[1]]}"#, "monoid.rank: required"),
        (r#"{"kind":"point","version":"1","finite_part":["-1"]}"#, "finite_part must be nonnegative"),
        (r#"{"kind":"monoid","version":"2","rank":1,"generators":[[1]]}"#, "monoid.version"),
        (r#"{"kind":"monoid","version":"1","rank":1,"generators":[[1]],"extra":0}"#, "unknown field"),
        (r#"{"version":"1"}"#, "document.kind: required"),
        ("not json", "parse error"),
    ];
    for (text, message) in cases {
        let err = parse_document(text, DEFAULT_MAX_ORBIT).unwrap_err().to_string();
        assert!(err.contains(message), "{text}: {err}");
        let path = write(&dir, "bad.json", text);
        assert_eq!(run(&["monoid", "saturate", p(&path)]).1, 2, "{text}");
    }
    // a valid monoid where a point is expected
    let m = write(&dir, "m.json", &emit(&Document::Monoid(AffineMonoid::free(1))));
    assert_eq!(run(&["cone", "rho", p(&m)]).1, 2);
    assert_eq!(run(&["cone", "rho", p(&dir.path().join("missing.json"))]).1, 2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).1, 2);
    assert_eq!(run(&["check", "--suite", "no-such-suite"]).1, 2);
    assert_eq!(execute(["--help"]).1, 0);

    // fiber products need an affine base: a domain error
    let dir = TempDir::new().unwrap();
    let p1 = from_toric_fan(1, &[vec![v(&[1])], vec![v(&[-1])]]).unwrap();
    let id = write(&dir, "id.json", &emit(&Document::Morphism(KatoFanMorphism::identity(&p1))));
    assert_eq!(run(&["fan", "fiber-product", p(&id), p(&id)]).1, 1);
}

#[test]
fn output_flag_and_orbit_limit() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "n2.json", &emit(&Document::Monoid(AffineMonoid::free(2))));
    let target = dir.path().join("faces.json");
    let (out, code) = execute(["monoid", "faces", p(&m), "--output", p(&target)]);
    assert_eq!((out.as_str(), code), ("", 0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(written["faces"].as_array().unwrap().len(), 4);
    assert!(written.get("strata").is_none());
    let (with_strata, _) = run(&["--emit-strata", "monoid", "faces", p(&m)]);
    assert_eq!(with_strata["strata"].as_array().unwrap().len(), 4);

    // the only test touching the environment
    let action = write(&dir, "swap.json", &emit(&Document::Action(swap_action())));
    std::env::set_var(MAX_ORBIT_ENV, "1");
    let limited = run(&["stack", "twisted-quotient", p(&action)]).1;
    std::env::remove_var(MAX_ORBIT_ENV);
    assert_ne!(limited, 0);
    let (out, code) = run(&["stack", "twisted-quotient", p(&action)]);
    assert_eq!((out["kind"].clone(), code), (json!("groupoid"), 0));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "n2.json", &emit(&Document::Monoid(AffineMonoid::free(2))));
    for args in [
        vec!["check", "--suite", "twisted", "--seed", "9"],
        vec!["trop", "quotient-check", p(&m), "--points", "60", "--seed", "4"],
        vec!["monoid", "faces", p(&m)],
    ] {
        let first = execute(args.iter().copied());
        assert_eq!(first, execute(args.iter().copied()), "{args:?}");
        assert_eq!(first.1, 0, "{args:?}");
    }
}

#[test]
fn every_kind_round_trips() {
    let n = AffineMonoid::free(1);
    let n2 = AffineMonoid::free(2);
    let cone = make_monoid(2, &[v(&[1, 0]), v(&[1, 1]), v(&[1, 2])]).unwrap();
    let hom = MonoidHom::new(Matrix::from_rows(1, &[v(&[1]), v(&[1])]).unwrap(), n.clone(), n2.clone()).unwrap();
    let p1 = from_toric_fan(1, &[vec![v(&[1])], vec![v(&[-1])]]).unwrap();
    let fan_n = spec_fan(&n).unwrap();
    let to_pt = KatoFanMorphism::new(fan_n, spec_fan(&AffineMonoid::zero()).unwrap(), vec![(0, Matrix::zeros(1, 0))]).unwrap();
    let product = fiber_product(&to_pt, &to_pt).unwrap();
    let u = ExtendedConePoint::new(&cone, &[], vec![katofan::Rational::new(1.into(), 2.into()); 3]).unwrap();
    let x = ArcPoint::new(u.clone(), vec![katofan::Rational::from_integer((-3).into()); 2]).unwrap();
    let mut report = serde_json::Map::new();
    report.insert("passed".into(), json!(true));
    report.insert("big".into(), json!("123456789012345678901234567890"));

    let docs = vec![
        Document::Monoid(cone.clone()),
        Document::Hom(hom),
        Document::Fan(p1.clone()),
        Document::Morphism(product.first.clone()),
        Document::Groupoid(twisted_product(&swap_action()).unwrap()),
        Document::Action(swap_action()),
        Document::Point(PointDoc::from_point(Carrier::Monoid(cone.clone()), 0, &u)),
        Document::Point(PointDoc::from_point(Carrier::Fan(p1.clone()), 1, &ExtendedConePoint::zero(&p1.charts()[1]).unwrap())),
        Document::Point(PointDoc::from_point(Carrier::Context, 0, &u)),
        Document::ArcPoint(ArcPointDoc::from_arc(Carrier::Monoid(cone.clone()), 0, &x)),
        Document::Polynomial(random_polynomial(&mut ChaCha8Rng::seed_from_u64(1), &cone, 4)),
        Document::Toric(ToricDoc { dim: 1, cones: vec![vec![v(&[1])], vec![v(&[-1])]] }),
        Document::Report(report),
    ];
    for d in &docs {
        assert_eq!(&reload(d), d, "{}", d.kind());
        // emitting twice gives the same bytes
        assert_eq!(emit(&reload(d)), emit(d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_documents_round_trip(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let m = random_fs_monoid(&mut r, 3, 4);
        let u = random_cone_point(&mut r, &m);
        let x = random_arc(&mut r, &m);
        let f = random_polynomial(&mut r, &m, 5);
        for d in [
            Document::Monoid(m.clone()),
            Document::Point(PointDoc::from_point(Carrier::Monoid(m.clone()), 0, &u)),
            Document::ArcPoint(ArcPointDoc::from_arc(Carrier::Monoid(m.clone()), 0, &x)),
            Document::Polynomial(f),
            Document::Fan(spec_fan(&m).unwrap()),
        ] {
            prop_assert_eq!(reload(&d), d);
        }
    }
}
