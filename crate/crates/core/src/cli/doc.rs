//! JSON documents: schema, loading and emission.
//!
//! Every top-level document carries `"kind"` and `"version": "1"`. Nested
//! documents may repeat their own `kind`/`version` (so that command output can
//! be pasted into larger documents) but need not. Unknown fields are rejected.
//!
//! Integers are JSON numbers (or decimal strings when they do not fit in 64
//! bits); rationals are strings `"a"` or `"a/b"`; `∞` is `"inf"`.
//!
//! A standalone monoid document may use any generators of any lattice; it is
//! normalized to canonical coordinates on load. Inside documents that also
//! carry matrices, exponents or generator indices, monoids must already be in
//! canonical form (as printed by `monoid normalize`), so that those data have
//! an unambiguous meaning.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::conecomplex::{ExtendedConePoint, ExtendedNonneg};
use crate::error::{Error, Result};
use crate::katofan::{from_toric_fan, Gluing, KatoFan, KatoFanMorphism};
use crate::lattice::Matrix;
use crate::monoid::{make_monoid, AffineMonoid, Face, MonoidHom, Vector};
use crate::scalar::Scalar;
use crate::stack::{GroupAction, KatoGroupoid};
use crate::trop::{ArcPoint, MonPolynomial};
use crate::{IntMatrix, Rational};

pub const VERSION: &str = "1";

pub const KINDS: &[&str] =
    &["monoid", "hom", "fan", "morphism", "groupoid", "action", "point", "arcpoint", "polynomial", "toric", "report"];

fn doc_err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

// ------------------------------------------------------------------ integers

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Int, E> {
                v.trim().parse().map(Int).map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

fn vector(v: &[Int]) -> Vector {
    v.iter().map(|x| x.0.clone()).collect()
}

fn rows(m: &IntMatrix) -> Vec<Vec<Int>> {
    m.to_rows().iter().map(|r| ints(r)).collect()
}

fn matrix(raw: &[Vec<Int>], nrows: usize, ncols: usize, path: &str) -> Result<IntMatrix> {
    if raw.len() != nrows || raw.iter().any(|r| r.len() != ncols) {
        return Err(doc_err(format!("{path}: expected a {nrows} x {ncols} matrix")));
    }
    let data: Vec<BigInt> = raw.iter().flatten().map(|x| x.0.clone()).collect();
    Matrix::new(nrows, ncols, data)
}

// ----------------------------------------------------------------- rationals

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str, path: &str) -> Result<Rational> {
    <Rational as Scalar>::parse(s).ok_or_else(|| doc_err(format!("{path}: not a rational: {s:?}")))
}

pub fn format_value(v: &ExtendedNonneg<Rational>) -> String {
    match v {
        ExtendedNonneg::Finite(q) => format_rational(q),
        ExtendedNonneg::Infinity => "inf".into(),
    }
}


// --------------------------------------------------------------- raw schemas

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMonoid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub rank: usize,
    pub generators: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHom {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub matrix: Vec<Vec<Int>>,
    pub source: RawMonoid,
    pub target: RawMonoid,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGluing {
    pub i: usize,
    pub face_i: Vec<usize>,
    pub j: usize,
    pub face_j: Vec<usize>,
    pub iso: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFan {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub charts: Vec<RawMonoid>,
    #[serde(default)]
    pub gluings: Vec<RawGluing>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChartMap {
    pub target_chart: usize,
    pub matrix: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMorphism {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub source: RawFan,
    pub target: RawFan,
    pub maps: Vec<RawChartMap>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGroupoid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    #[serde(rename = "U")]
    pub u: RawFan,
    #[serde(rename = "R")]
    pub r: RawFan,
    pub s: RawMorphism,
    pub t: RawMorphism,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAction {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub monoid: RawMonoid,
    pub generators: Vec<Vec<Vec<Int>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPoint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monoid: Option<RawMonoid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<RawFan>,
    #[serde(default)]
    pub chart: usize,
    #[serde(default)]
    pub infinity_prime: Vec<usize>,
    pub finite_part: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawArcPoint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monoid: Option<RawMonoid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<RawFan>,
    #[serde(default)]
    pub chart: usize,
    #[serde(default)]
    pub infinity_prime: Vec<usize>,
    pub finite_part: Vec<String>,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub exp: Vec<Int>,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPolynomial {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub monoid: RawMonoid,
    pub terms: Vec<RawTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawToric {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub dim: usize,
    pub cones: Vec<Vec<Vec<Int>>>,
}

// ------------------------------------------------------------- typed values

/// Where a point lives.
#[derive(Clone, Debug, PartialEq)]
pub enum Carrier {
    Monoid(AffineMonoid),
    Fan(KatoFan),
    /// Supplied by the command (e.g. the `U` of a groupoid).
    Context,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointDoc {
    pub carrier: Carrier,
    pub chart: usize,
    pub infinity_prime: Vec<usize>,
    pub finite_part: Vec<Rational>,
}

impl PointDoc {
    pub fn from_point(carrier: Carrier, chart: usize, u: &ExtendedConePoint<Rational>) -> Self {
        PointDoc { carrier, chart, infinity_prime: u.infinity_prime(), finite_part: u.finite_part() }
    }

    /// The fan the point lives on, if it names one.
    pub fn fan<'a>(&'a self, context: Option<&'a KatoFan>) -> Option<&'a KatoFan> {
        match &self.carrier {
            Carrier::Fan(f) => Some(f),
            _ => context,
        }
    }

    pub fn monoid<'a>(&'a self, context: Option<&'a KatoFan>) -> Result<&'a AffineMonoid> {
        let fan = match &self.carrier {
            Carrier::Monoid(m) => return Ok(m),
            Carrier::Fan(f) => f,
            Carrier::Context => context.ok_or_else(|| doc_err("point.monoid: required (or point.fan)"))?,
        };
        fan.charts().get(self.chart).ok_or_else(|| Error::OutOfRange(format!("point.chart: {}", self.chart)))
    }

    pub fn cone_point(&self, context: Option<&KatoFan>) -> Result<ExtendedConePoint<Rational>> {
        ExtendedConePoint::new(self.monoid(context)?, &self.infinity_prime, self.finite_part.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcPointDoc {
    pub point: PointDoc,
    pub coeffs: Vec<Rational>,
}

impl ArcPointDoc {
    pub fn from_arc(carrier: Carrier, chart: usize, x: &ArcPoint<Rational>) -> Self {
        ArcPointDoc { point: PointDoc::from_point(carrier, chart, x.exponents()), coeffs: x.coeffs().to_vec() }
    }

    pub fn arc(&self, context: Option<&KatoFan>) -> Result<ArcPoint<Rational>> {
        ArcPoint::new(self.point.cone_point(context)?, self.coeffs.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricDoc {
    pub dim: usize,
    pub cones: Vec<Vec<Vector>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Monoid(AffineMonoid),
    Hom(MonoidHom),
    Fan(KatoFan),
    Morphism(KatoFanMorphism),
    Groupoid(KatoGroupoid),
    Action(GroupAction),
    Point(PointDoc),
    ArcPoint(ArcPointDoc),
    Polynomial(MonPolynomial<Rational>),
    Toric(ToricDoc),
    Report(Map<String, Value>),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Monoid(_) => "monoid",
            Document::Hom(_) => "hom",
            Document::Fan(_) => "fan",
            Document::Morphism(_) => "morphism",
            Document::Groupoid(_) => "groupoid",
            Document::Action(_) => "action",
            Document::Point(_) => "point",
            Document::ArcPoint(_) => "arcpoint",
            Document::Polynomial(_) => "polynomial",
            Document::Toric(_) => "toric",
            Document::Report(_) => "report",
        }
    }
}

// ------------------------------------------------------------------ loading

/// Parses a document from JSON text.
pub fn parse_document(text: &str, max_orbit: usize) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(|e| doc_err(format!("parse error: {e}")))?;
    from_value(value, max_orbit)
}

pub fn from_value(value: Value, max_orbit: usize) -> Result<Document> {
    let Value::Object(obj) = &value else {
        return Err(doc_err("document: expected a JSON object"));
    };
    let kind = match obj.get("kind") {
        Some(Value::String(k)) => k.clone(),
        Some(_) => return Err(doc_err("document.kind: expected a string")),
        None => return Err(doc_err("document.kind: required")),
    };
    if !KINDS.contains(&kind.as_str()) {
        return Err(doc_err(format!("document.kind: unknown kind {kind:?}")));
    }
    match obj.get("version") {
        Some(Value::String(v)) if v == VERSION => {}
        Some(Value::String(v)) => return Err(doc_err(format!("{kind}.version: unsupported version {v:?}, expected \"1\""))),
        Some(_) => return Err(doc_err(format!("{kind}.version: expected a string"))),
        None => return Err(doc_err(format!("{kind}.version: required"))),
    }
    let k = kind.as_str();
    Ok(match k {
        "monoid" => Document::Monoid(load_monoid(&raw(k, value)?, k, false)?),
        "hom" => Document::Hom(load_hom(&raw(k, value)?, k)?),
        "fan" => Document::Fan(load_fan(&raw(k, value)?, k)?),
        "morphism" => Document::Morphism(load_morphism(&raw(k, value)?, k)?),
        "groupoid" => Document::Groupoid(load_groupoid(&raw(k, value)?, k)?),
        "action" => Document::Action(load_action(&raw(k, value)?, k, max_orbit)?),
        "point" => Document::Point(load_point(&raw(k, value)?, k)?),
        "arcpoint" => Document::ArcPoint(load_arcpoint(&raw(k, value)?, k)?),
        "polynomial" => Document::Polynomial(load_polynomial(&raw(k, value)?, k)?),
        "toric" => Document::Toric(load_toric(&raw(k, value)?, k)?),
        _ => {
            let Value::Object(mut m) = value else { unreachable!() };
            m.remove("kind");
            m.remove("version");
            Document::Report(m)
        }
    })
}

/// Typed view of the payload, with serde errors rewritten as
/// `path.field: reason`.
fn raw<T: for<'de> Deserialize<'de>>(kind: &str, value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let prefix = if path.is_empty() || path == "." { kind.to_string() } else { format!("{kind}.{path}") };
        let msg = e.into_inner().to_string();
        if let Some(field) = backticked(&msg, "missing field ") {
            doc_err(format!("{prefix}.{field}: required"))
        } else if backticked(&msg, "unknown field ").is_some() {
            // the path already ends at the offending field
            doc_err(format!("{prefix}: unknown field"))
        } else {
            doc_err(format!("{prefix}: {msg}"))
        }
    })
}

fn backticked<'a>(msg: &'a str, lead: &str) -> Option<&'a str> {
    let rest = msg.strip_prefix(lead)?.strip_prefix('`')?;
    rest.split('`').next()
}

fn check_nested(kind: &Option<String>, version: &Option<String>, expected: &str, path: &str) -> Result<()> {
    if let Some(k) = kind {
        if k != expected {
            return Err(doc_err(format!("{path}.kind: expected {expected:?}, found {k:?}")));
        }
    }
    if let Some(v) = version {
        if v != VERSION {
            return Err(doc_err(format!("{path}.version: unsupported version {v:?}, expected \"1\"")));
        }
    }
    Ok(())
}

/// `canonical`: the generators must already be the canonical ones.
fn load_monoid(r: &RawMonoid, path: &str, canonical: bool) -> Result<AffineMonoid> {
    check_nested(&r.kind, &r.version, "monoid", path)?;
    let gens: Vec<Vector> = r.generators.iter().map(|g| vector(g)).collect();
    if let Some(i) = gens.iter().position(|g| g.len() != r.rank) {
        return Err(doc_err(format!("{path}.generators[{i}]: expected {} entries", r.rank)));
    }
    let m = make_monoid(r.rank, &gens)?;
    if canonical && (m.rank() != r.rank || m.generators() != gens.as_slice()) {
        return Err(doc_err(format!(
            "{path}: generators are not in canonical form (normalize the monoid first; canonical generators {})",
            serde_json::to_string(&m.generators().iter().map(|g| ints(g)).collect::<Vec<_>>()).unwrap()
        )));
    }
    Ok(m)
}

fn load_hom(r: &RawHom, path: &str) -> Result<MonoidHom> {
    check_nested(&r.kind, &r.version, "hom", path)?;
    let source = load_monoid(&r.source, &format!("{path}.source"), true)?;
    let target = load_monoid(&r.target, &format!("{path}.target"), true)?;
    let m = matrix(&r.matrix, target.rank(), source.rank(), &format!("{path}.matrix"))?;
    MonoidHom::new(m, source, target)
}

fn face(m: &AffineMonoid, idx: &[usize], path: &str) -> Result<Face> {
    if let Some(i) = idx.iter().find(|&&i| i >= m.generators().len()) {
        return Err(doc_err(format!("{path}: generator index {i} out of range")));
    }
    Ok(Face::new(idx.to_vec()))
}

fn load_fan(r: &RawFan, path: &str) -> Result<KatoFan> {
    check_nested(&r.kind, &r.version, "fan", path)?;
    let charts: Vec<AffineMonoid> = r
        .charts
        .iter()
        .enumerate()
        .map(|(c, m)| load_monoid(m, &format!("{path}.charts[{c}]"), true))
        .collect::<Result<_>>()?;
    let mut gluings = Vec::new();
    for (k, g) in r.gluings.iter().enumerate() {
        let gp = format!("{path}.gluings[{k}]");
        let (Some(pi), Some(pj)) = (charts.get(g.i), charts.get(g.j)) else {
            return Err(doc_err(format!("{gp}: chart index out of range")));
        };
        let face_i = face(pi, &g.face_i, &format!("{gp}.face_i"))?;
        let face_j = face(pj, &g.face_j, &format!("{gp}.face_j"))?;
        let di = crate::monoid::sharp_localize(pi, &face_i)?.monoid.rank();
        let dj = crate::monoid::sharp_localize(pj, &face_j)?.monoid.rank();
        let iso = matrix(&g.iso, dj, di, &format!("{gp}.iso"))?;
        gluings.push(Gluing { i: g.i, face_i, j: g.j, face_j, iso });
    }
    KatoFan::new(charts, gluings)
}

fn load_morphism(r: &RawMorphism, path: &str) -> Result<KatoFanMorphism> {
    check_nested(&r.kind, &r.version, "morphism", path)?;
    let source = load_fan(&r.source, &format!("{path}.source"))?;
    let target = load_fan(&r.target, &format!("{path}.target"))?;
    let mut maps = Vec::new();
    for (s, cm) in r.maps.iter().enumerate() {
        let mp = format!("{path}.maps[{s}]");
        let (Some(ps), Some(pt)) = (source.charts().get(s), target.charts().get(cm.target_chart)) else {
            return Err(doc_err(format!("{mp}: chart index out of range")));
        };
        maps.push((cm.target_chart, matrix(&cm.matrix, ps.rank(), pt.rank(), &format!("{mp}.matrix"))?));
    }
    KatoFanMorphism::new(source, target, maps)
}

fn load_groupoid(r: &RawGroupoid, path: &str) -> Result<KatoGroupoid> {
    check_nested(&r.kind, &r.version, "groupoid", path)?;
    let u = load_fan(&r.u, &format!("{path}.U"))?;
    let rr = load_fan(&r.r, &format!("{path}.R"))?;
    let s = load_morphism(&r.s, &format!("{path}.s"))?;
    let t = load_morphism(&r.t, &format!("{path}.t"))?;
    for (name, m) in [("s", &s), ("t", &t)] {
        if *m.source() != rr || *m.target() != u {
            return Err(Error::Incompatible(format!("{path}.{name} does not map R to U")));
        }
    }
    KatoGroupoid::new(s, t)
}

fn load_action(r: &RawAction, path: &str, max_orbit: usize) -> Result<GroupAction> {
    check_nested(&r.kind, &r.version, "action", path)?;
    let m = load_monoid(&r.monoid, &format!("{path}.monoid"), true)?;
    let gens = r
        .generators
        .iter()
        .enumerate()
        .map(|(k, g)| matrix(g, m.rank(), m.rank(), &format!("{path}.generators[{k}]")))
        .collect::<Result<_>>()?;
    GroupAction::new(m, gens, max_orbit)
}

fn point_parts(
    monoid: &Option<RawMonoid>,
    fan: &Option<RawFan>,
    chart: usize,
    infinity_prime: &[usize],
    finite_part: &[String],
    path: &str,
) -> Result<PointDoc> {
    let finite: Vec<Rational> = finite_part
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s, &format!("{path}.finite_part[{i}]")))
        .collect::<Result<_>>()?;
    if finite.iter().any(|x| x.is_negative()) {
        return Err(doc_err("finite_part must be nonnegative"));
    }
    let carrier = match (monoid, fan) {
        (Some(_), Some(_)) => return Err(doc_err(format!("{path}: give either monoid or fan, not both"))),
        (Some(m), None) => Carrier::Monoid(load_monoid(m, &format!("{path}.monoid"), true)?),
        (None, Some(f)) => Carrier::Fan(load_fan(f, &format!("{path}.fan"))?),
        (None, None) => Carrier::Context,
    };
    let mut ip = infinity_prime.to_vec();
    ip.sort_unstable();
    ip.dedup();
    let doc = PointDoc { carrier, chart, infinity_prime: ip, finite_part: finite };
    if doc.carrier != Carrier::Context {
        doc.cone_point(None)?;
    }
    Ok(doc)
}

fn load_point(r: &RawPoint, path: &str) -> Result<PointDoc> {
    check_nested(&r.kind, &r.version, "point", path)?;
    point_parts(&r.monoid, &r.fan, r.chart, &r.infinity_prime, &r.finite_part, path)
}

fn load_arcpoint(r: &RawArcPoint, path: &str) -> Result<ArcPointDoc> {
    check_nested(&r.kind, &r.version, "arcpoint", path)?;
    let point = point_parts(&r.monoid, &r.fan, r.chart, &r.infinity_prime, &r.finite_part, path)?;
    let coeffs = r
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s, &format!("{path}.coeffs[{i}]")))
        .collect::<Result<_>>()?;
    let doc = ArcPointDoc { point, coeffs };
    if doc.point.carrier != Carrier::Context {
        doc.arc(None)?;
    }
    Ok(doc)
}

fn load_polynomial(r: &RawPolynomial, path: &str) -> Result<MonPolynomial<Rational>> {
    check_nested(&r.kind, &r.version, "polynomial", path)?;
    let m = load_monoid(&r.monoid, &format!("{path}.monoid"), true)?;
    let mut terms = Vec::new();
    for (k, t) in r.terms.iter().enumerate() {
        let tp = format!("{path}.terms[{k}]");
        if t.exp.len() != m.rank() {
            return Err(doc_err(format!("{tp}.exp: expected {} entries", m.rank())));
        }
        terms.push((vector(&t.exp), parse_rational(&t.coeff, &format!("{tp}.coeff"))?));
    }
    MonPolynomial::new(&m, terms)
}

fn load_toric(r: &RawToric, path: &str) -> Result<ToricDoc> {
    check_nested(&r.kind, &r.version, "toric", path)?;
    let cones: Vec<Vec<Vector>> = r.cones.iter().map(|c| c.iter().map(|v| vector(v)).collect()).collect();
    for (k, c) in cones.iter().enumerate() {
        if let Some(i) = c.iter().position(|v| v.len() != r.dim) {
            return Err(doc_err(format!("{path}.cones[{k}][{i}]: expected {} entries", r.dim)));
        }
    }
    Ok(ToricDoc { dim: r.dim, cones })
}

impl ToricDoc {
    pub fn fan(&self) -> Result<KatoFan> {
        from_toric_fan(self.dim, &self.cones)
    }
}

// ----------------------------------------------------------------- emission

fn tagged<T: Serialize>(kind: &str, raw: &T) -> Value {
    let mut v = serde_json::to_value(raw).expect("documents serialize");
    if let Value::Object(m) = &mut v {
        m.insert("kind".into(), Value::String(kind.into()));
        m.insert("version".into(), Value::String(VERSION.into()));
    }
    v
}

pub fn raw_monoid(m: &AffineMonoid) -> RawMonoid {
    RawMonoid { kind: None, version: None, rank: m.rank(), generators: m.generators().iter().map(|g| ints(g)).collect() }
}

pub fn raw_hom(h: &MonoidHom) -> RawHom {
    RawHom {
        kind: None,
        version: None,
        matrix: rows(h.matrix()),
        source: raw_monoid(h.source()),
        target: raw_monoid(h.target()),
    }
}

pub fn raw_fan(f: &KatoFan) -> RawFan {
    RawFan {
        kind: None,
        version: None,
        charts: f.charts().iter().map(raw_monoid).collect(),
        gluings: f
            .gluings()
            .iter()
            .map(|g| RawGluing {
                i: g.i,
                face_i: g.face_i.indices().to_vec(),
                j: g.j,
                face_j: g.face_j.indices().to_vec(),
                iso: rows(&g.iso),
            })
            .collect(),
    }
}

pub fn raw_morphism(m: &KatoFanMorphism) -> RawMorphism {
    RawMorphism {
        kind: None,
        version: None,
        source: raw_fan(m.source()),
        target: raw_fan(m.target()),
        maps: m
            .chart_maps()
            .iter()
            .map(|cm| RawChartMap { target_chart: cm.target_chart, matrix: rows(cm.hom.matrix()) })
            .collect(),
    }
}

pub fn raw_groupoid(g: &KatoGroupoid) -> RawGroupoid {
    RawGroupoid {
        kind: None,
        version: None,
        u: raw_fan(g.u()),
        r: raw_fan(g.r()),
        s: raw_morphism(g.s()),
        t: raw_morphism(g.t()),
    }
}

fn carrier_parts(c: &Carrier) -> (Option<RawMonoid>, Option<RawFan>) {
    match c {
        Carrier::Monoid(m) => (Some(raw_monoid(m)), None),
        Carrier::Fan(f) => (None, Some(raw_fan(f))),
        Carrier::Context => (None, None),
    }
}

pub fn raw_point(p: &PointDoc) -> RawPoint {
    let (monoid, fan) = carrier_parts(&p.carrier);
    RawPoint {
        kind: None,
        version: None,
        monoid,
        fan,
        chart: p.chart,
        infinity_prime: p.infinity_prime.clone(),
        finite_part: p.finite_part.iter().map(format_rational).collect(),
    }
}

pub fn raw_arcpoint(a: &ArcPointDoc) -> RawArcPoint {
    let p = raw_point(&a.point);
    RawArcPoint {
        kind: None,
        version: None,
        monoid: p.monoid,
        fan: p.fan,
        chart: p.chart,
        infinity_prime: p.infinity_prime,
        finite_part: p.finite_part,
        coeffs: a.coeffs.iter().map(format_rational).collect(),
    }
}

pub fn raw_polynomial(f: &MonPolynomial<Rational>) -> RawPolynomial {
    RawPolynomial {
        kind: None,
        version: None,
        monoid: raw_monoid(f.monoid()),
        terms: f.terms().iter().map(|(e, c)| RawTerm { exp: ints(e), coeff: format_rational(c) }).collect(),
    }
}

/// The document as a JSON value, with `kind` and `version`.
pub fn to_value(doc: &Document) -> Value {
    let k = doc.kind();
    match doc {
        Document::Monoid(m) => tagged(k, &raw_monoid(m)),
        Document::Hom(h) => tagged(k, &raw_hom(h)),
        Document::Fan(f) => tagged(k, &raw_fan(f)),
        Document::Morphism(m) => tagged(k, &raw_morphism(m)),
        Document::Groupoid(g) => tagged(k, &raw_groupoid(g)),
        Document::Action(a) => tagged(
            k,
            &RawAction {
                kind: None,
                version: None,
                monoid: raw_monoid(a.monoid()),
                generators: a.generators().iter().map(rows).collect(),
            },
        ),
        Document::Point(p) => tagged(k, &raw_point(p)),
        Document::ArcPoint(a) => tagged(k, &raw_arcpoint(a)),
        Document::Polynomial(f) => tagged(k, &raw_polynomial(f)),
        Document::Toric(t) => tagged(
            k,
            &RawToric {
                kind: None,
                version: None,
                dim: t.dim,
                cones: t.cones.iter().map(|c| c.iter().map(|v| ints(v)).collect()).collect(),
            },
        ),
        Document::Report(m) => tagged(k, m),
    }
}

/// One line of JSON with a trailing newline. Object keys are sorted, so the
/// text depends only on the document.
pub fn emit(doc: &Document) -> String {
    let mut s = serde_json::to_string(&to_value(doc)).expect("documents serialize");
    s.push('\n');
    s
}
