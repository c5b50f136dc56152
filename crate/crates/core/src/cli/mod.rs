//! Command-line surface: one JSON document in per argument, one out.
//!
//! Exit codes: 0 success, 1 domain error (or a failed check), 2 usage error
//! (bad arguments, unreadable input, schema violations).

pub mod doc;

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::conecomplex::{
    coequalize, complex_points_equal, reduction_map, strata, structure_map, ComplexPoint, ExtendedConePoint,
};
use crate::error::{Error, Result};
use crate::katofan::{fiber_product, spec_fan, KatoFan};
use crate::linalg;
use crate::monoid::{face_functional, faces, fs_pushout, AffineMonoid};
use crate::stack::{twisted_product, KatoGroupoid, DEFAULT_MAX_ORBIT};
use crate::trop::{
    arc_valuation, eta_tensor_valuation, gauss_valuation, pullback, quotient_check, retract, trop_fan_point,
    trop_point, MonPolynomial, Pullback,
};
use crate::verify::{random_arc, random_polynomial, run_suite};
use crate::Rational;

use doc::{
    format_value, raw_fan, raw_hom, raw_monoid, raw_morphism, raw_point, ArcPointDoc, Carrier, Document, PointDoc,
};

pub const MAX_ORBIT_ENV: &str = "KATOFAN_MAX_ORBIT";

#[derive(Parser, Debug)]
#[command(name = "katofan", version, about = "Exact computations with fs monoids, Kato fans and Kato stacks")]
struct Cli {
    /// Write the output document here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Add strata tables (for external plotting) to `monoid faces` and
    /// `trop quotient-check`.
    #[arg(long, global = true)]
    emit_strata: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Affine monoids.
    #[command(subcommand)]
    Monoid(MonoidCmd),
    /// Kato fans and their morphisms.
    #[command(subcommand)]
    Fan(FanCmd),
    /// Extended cone points.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Groupoid presentations of Kato stacks.
    #[command(subcommand)]
    Stack(StackCmd),
    /// Valuations, tropicalization and the skeleton.
    #[command(subcommand)]
    Trop(TropCmd),
    /// Run a randomized verification suite.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Input files; `-` reads stdin.
#[derive(Subcommand, Debug)]
enum MonoidCmd {
    /// Canonical coordinates of a monoid given by any generators.
    Normalize { file: PathBuf },
    Saturate { file: PathBuf },
    /// The sharpening hom `P -> P/P*`.
    Sharpen { file: PathBuf },
    Faces { file: PathBuf },
    /// fs pushout of two homs with a common source.
    Pushout { left: PathBuf, right: PathBuf },
}

#[derive(Subcommand, Debug)]
enum FanCmd {
    Spec { file: PathBuf },
    FromToric { file: PathBuf },
    FiberProduct { first: PathBuf, second: PathBuf },
    Strict { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ConeCmd {
    /// Values on the generators, and at `--at` if given.
    Eval {
        point: PathBuf,
        /// An element of the monoid, as a JSON array in canonical coordinates.
        #[arg(long)]
        at: Option<String>,
    },
    /// Structure map: the prime where the point is infinite.
    Rho { point: PathBuf },
    /// Reduction map: the prime where the point is positive.
    R { point: PathBuf },
    Equal { first: PathBuf, second: PathBuf },
    /// Orbit of a point of the extended cone complex of `U` under a groupoid.
    Coequalize { groupoid: PathBuf, point: PathBuf },
}

#[derive(Subcommand, Debug)]
enum StackCmd {
    Validate { file: PathBuf },
    /// Twisted product of a group action.
    TwistedQuotient { file: PathBuf },
    Isotropy {
        file: PathBuf,
        #[arg(long)]
        point: Option<usize>,
    },
    Faithful { file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Pi,
    Mu,
}

#[derive(Subcommand, Debug)]
enum TropCmd {
    /// Valuation of a polynomial at a point (Gauss) or arc point.
    Eval { point: PathBuf, polynomial: PathBuf },
    /// Tropicalization of an arc point.
    Point { arcpoint: PathBuf },
    /// Skeleton retraction of an arc point, as the cone point of its Gauss point.
    Retract { arcpoint: PathBuf },
    /// Valuation at `η ⊗ x` of the pullback of a polynomial.
    Eta {
        arcpoint: PathBuf,
        polynomial: PathBuf,
        #[arg(long, value_enum)]
        pullback: Which,
    },
    QuotientCheck {
        monoid: PathBuf,
        #[arg(long, default_value_t = 500)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Document(_)) { 2 } else { 1 };
        Failure { code, message: e.to_string() }
    }
}

/// Result of a successful parse-and-run: the document and whether it
/// reports a failed check.
struct Output {
    doc: Document,
    ok: bool,
}

fn done(doc: Document) -> std::result::Result<Output, Failure> {
    Ok(Output { doc, ok: true })
}

fn report(v: Value) -> Document {
    match v {
        Value::Object(m) => Document::Report(m),
        _ => unreachable!("reports are objects"),
    }
}

pub fn max_orbit() -> usize {
    std::env::var(MAX_ORBIT_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_MAX_ORBIT)
}

/// Reads and validates a document; `-` is stdin.
pub fn load_document(path: &Path) -> Result<Document> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Document(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Document(format!("{}: {e}", path.display())))?
    };
    doc::parse_document(&text, max_orbit())
}

fn wrong_kind(path: &Path, got: &Document, want: &str) -> Error {
    Error::Document(format!("{}: expected a {want} document, found {}", path.display(), got.kind()))
}

fn load_monoid(path: &Path) -> Result<AffineMonoid> {
    match load_document(path)? {
        Document::Monoid(m) => Ok(m),
        d => Err(wrong_kind(path, &d, "monoid")),
    }
}

fn load_polynomial(path: &Path) -> Result<MonPolynomial<Rational>> {
    match load_document(path)? {
        Document::Polynomial(f) => Ok(f),
        d => Err(wrong_kind(path, &d, "polynomial")),
    }
}

fn load_groupoid(path: &Path) -> Result<KatoGroupoid> {
    match load_document(path)? {
        Document::Groupoid(g) => Ok(g),
        Document::Action(a) => twisted_product(&a),
        d => Err(wrong_kind(path, &d, "groupoid or action")),
    }
}

fn load_point(path: &Path) -> Result<PointDoc> {
    match load_document(path)? {
        Document::Point(p) => Ok(p),
        d => Err(wrong_kind(path, &d, "point")),
    }
}

fn load_arcpoint(path: &Path) -> Result<ArcPointDoc> {
    match load_document(path)? {
        Document::ArcPoint(a) => Ok(a),
        d => Err(wrong_kind(path, &d, "arcpoint")),
    }
}

fn load_morphism(path: &Path) -> Result<crate::katofan::KatoFanMorphism> {
    match load_document(path)? {
        Document::Morphism(m) => Ok(m),
        d => Err(wrong_kind(path, &d, "morphism")),
    }
}

fn point_json(chart: usize, u: &ExtendedConePoint<Rational>) -> Value {
    serde_json::to_value(raw_point(&PointDoc::from_point(Carrier::Context, chart, u))).expect("serializable")
}

fn complex_json(cp: &ComplexPoint<Rational>) -> Value {
    point_json(cp.chart, &cp.point)
}

fn face_rank(p: &AffineMonoid, gens: &[Vec<BigInt>]) -> usize {
    if gens.is_empty() {
        return 0;
    }
    let m = crate::lattice::Matrix::from_rows(p.rank(), gens).expect("generator length");
    linalg::field_rank::<Rational>(&linalg::to_field(&m))
}

/// Runs the command line (without the program name) and returns the output
/// document text and exit code. Diagnostics go to stderr.
pub fn execute<I, T>(argv: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = std::iter::once(OsString::from("katofan")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                return (e.to_string(), 0);
            }
            eprint!("{e}");
            return (String::new(), 2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = doc::emit(&out.doc);
            let code = if out.ok { 0 } else { 1 };
            match &cli.output {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => (String::new(), code),
                    Err(e) => {
                        eprintln!("error: {}: {e}", path.display());
                        (String::new(), 2)
                    }
                },
                None => (text, code),
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            (String::new(), f.code)
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<Output, Failure> {
    match &cli.command {
        Command::Monoid(c) => monoid_cmd(c, cli.emit_strata),
        Command::Fan(c) => fan_cmd(c),
        Command::Cone(c) => cone_cmd(c),
        Command::Stack(c) => stack_cmd(c),
        Command::Trop(c) => trop_cmd(c, cli.emit_strata),
        Command::Check { suite, seed } => {
            let r = run_suite(suite, *seed).map_err(|e| match e {
                Error::Document(m) => Failure { code: 2, message: m },
                e => e.into(),
            })?;
            let ok = r.passed();
            let stats: Map<String, Value> = r.stats.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            let doc = report(json!({
                "suite": r.suite,
                "seed": r.seed,
                "cases": r.cases,
                "passed": ok,
                "failures": r.failures,
                "stats": stats,
            }));
            Ok(Output { doc, ok })
        }
    }
}

fn monoid_cmd(c: &MonoidCmd, emit_strata: bool) -> std::result::Result<Output, Failure> {
    match c {
        MonoidCmd::Normalize { file } => done(Document::Monoid(load_monoid(file)?)),
        MonoidCmd::Saturate { file } => done(Document::Monoid(load_monoid(file)?.saturate())),
        MonoidCmd::Sharpen { file } => done(Document::Hom(load_monoid(file)?.sharpen().1)),
        MonoidCmd::Faces { file } => {
            let p = load_monoid(file)?;
            let fs = faces(&p);
            let rows: Vec<Value> = fs
                .iter()
                .map(|f| {
                    json!({
                        "face": f.indices(),
                        "prime": f.prime(&p),
                        "functional": face_functional(&p, f).iter().map(|x| doc::Int(x.clone())).collect::<Vec<_>>(),
                        "dimension": face_rank(&p, &f.generators(&p)),
                    })
                })
                .collect();
            let mut out = json!({ "monoid": raw_monoid(&p), "faces": rows });
            if emit_strata {
                // stratum of a prime q: points with u⁻¹(∞) = q; its closure
                // holds the strata of the larger primes
                let table: Vec<Value> = fs
                    .iter()
                    .map(|f| {
                        let closure: Vec<usize> =
                            (0..fs.len()).filter(|&k| fs[k].is_subset(f)).collect();
                        json!({
                            "infinity_prime": f.prime(&p),
                            "dimension": face_rank(&p, &f.generators(&p)),
                            "closure": closure,
                        })
                    })
                    .collect();
                out["strata"] = json!(table);
            }
            done(report(out))
        }
        MonoidCmd::Pushout { left, right } => {
            let load = |path: &Path| match load_document(path)? {
                Document::Hom(h) => Ok(h),
                d => Err(wrong_kind(path, &d, "hom")),
            };
            let po = fs_pushout(&load(left)?, &load(right)?)?;
            done(report(json!({
                "monoid": raw_monoid(&po.monoid),
                "left": raw_hom(&po.left),
                "right": raw_hom(&po.right),
            })))
        }
    }
}

fn fan_cmd(c: &FanCmd) -> std::result::Result<Output, Failure> {
    match c {
        FanCmd::Spec { file } => done(Document::Fan(spec_fan(&load_monoid(file)?)?)),
        FanCmd::FromToric { file } => match load_document(file)? {
            Document::Toric(t) => done(Document::Fan(t.fan()?)),
            d => Err(wrong_kind(file, &d, "toric").into()),
        },
        FanCmd::FiberProduct { first, second } => {
            let fp = fiber_product(&load_morphism(first)?, &load_morphism(second)?)?;
            done(report(json!({
                "fan": raw_fan(&fp.fan),
                "first": raw_morphism(&fp.first),
                "second": raw_morphism(&fp.second),
                "pairs": fp.pairs,
            })))
        }
        FanCmd::Strict { file } => {
            let m = load_morphism(file)?;
            done(report(json!({
                "strict": m.is_strict(),
                "surjective": m.is_surjective(),
                "point_map": m.point_map(),
            })))
        }
    }
}

/// A point with the fan it lives on (`None` for a bare monoid).
fn located(p: &PointDoc) -> Result<(Option<KatoFan>, ExtendedConePoint<Rational>)> {
    let u = p.cone_point(None)?;
    Ok((p.fan(None).cloned(), u))
}

fn cone_cmd(c: &ConeCmd) -> std::result::Result<Output, Failure> {
    match c {
        ConeCmd::Eval { point, at } => {
            let (_, u) = located(&load_point(point)?)?;
            let values: Vec<String> = u.values().iter().map(format_value).collect();
            let mut out = json!({ "values": values });
            if let Some(at) = at {
                let v: Vec<doc::Int> = serde_json::from_str(at)
                    .map_err(|e| Error::Document(format!("--at: expected a JSON integer array: {e}")))?;
                let v: Vec<BigInt> = v.into_iter().map(|x| x.0).collect();
                if v.len() != u.monoid().rank() {
                    return Err(Error::Document(format!("--at: expected {} entries", u.monoid().rank())).into());
                }
                out["value"] = json!(format_value(&u.eval(&v)?));
            }
            done(report(out))
        }
        ConeCmd::Rho { point } => {
            let (_, u) = located(&load_point(point)?)?;
            done(report(json!({ "prime": structure_map(&u) })))
        }
        ConeCmd::R { point } => {
            let (_, u) = located(&load_point(point)?)?;
            done(report(json!({ "prime": reduction_map(&u) })))
        }
        ConeCmd::Equal { first, second } => {
            let (a, b) = (load_point(first)?, load_point(second)?);
            let equal = match (&a.carrier, &b.carrier) {
                (Carrier::Fan(f), Carrier::Fan(g)) if f == g => {
                    let pa = ComplexPoint::new(f, a.chart, a.cone_point(None)?)?;
                    let pb = ComplexPoint::new(f, b.chart, b.cone_point(None)?)?;
                    complex_points_equal(f, &pa, &pb)?
                }
                (Carrier::Monoid(p), Carrier::Monoid(q)) if p == q => a.cone_point(None)? == b.cone_point(None)?,
                _ => return Err(Error::Incompatible("points lie on different fans".into()).into()),
            };
            done(report(json!({ "equal": equal })))
        }
        ConeCmd::Coequalize { groupoid, point } => {
            let g = load_groupoid(groupoid)?;
            let p = load_point(point)?;
            if let Carrier::Fan(f) = &p.carrier {
                if f != g.u() {
                    return Err(Error::Incompatible("point does not lie on U".into()).into());
                }
            }
            if let Carrier::Monoid(_) = &p.carrier {
                if !g.u().is_affine() || p.chart != 0 {
                    return Err(Error::Incompatible("point does not lie on U".into()).into());
                }
            }
            let cp = ComplexPoint::new(g.u(), p.chart, p.cone_point(Some(g.u()))?)?;
            let c = coequalize(&g, &cp)?;
            done(report(json!({
                "representative": complex_json(&c.representative),
                "orbit": c.orbit.iter().map(complex_json).collect::<Vec<_>>(),
                "depth": c.depth,
                "depth_bound": c.depth_bound,
            })))
        }
    }
}

fn stack_cmd(c: &StackCmd) -> std::result::Result<Output, Failure> {
    match c {
        StackCmd::Validate { file } => {
            let r = load_groupoid(file)?.validate();
            let witness: Vec<Value> =
                r.composition_witness.iter().map(|(&(a, b), &c)| json!({ "first": a, "second": b, "composite": c })).collect();
            done(report(json!({
                "valid": r.is_valid(),
                "s_strict": r.s_strict,
                "t_strict": r.t_strict,
                "surjective": r.surjective,
                "unit": r.unit,
                "inverse": r.inverse,
                "composition": r.composition,
                "violations": r.violations,
                "units": r.units,
                "inverses": r.inverses,
                "composition_witness": witness,
            })))
        }
        StackCmd::TwistedQuotient { file } => match load_document(file)? {
            Document::Action(a) => done(Document::Groupoid(twisted_product(&a)?)),
            d => Err(wrong_kind(file, &d, "action").into()),
        },
        StackCmd::Isotropy { file, point } => {
            let g = load_groupoid(file)?;
            let n = g.u().points().len();
            let xs: Vec<usize> = match point {
                Some(x) if *x >= n => return Err(Error::OutOfRange(format!("point {x} of {n}")).into()),
                Some(x) => vec![*x],
                None => (0..n).collect(),
            };
            let mut rows = Vec::new();
            for x in xs {
                let iso: Vec<Value> = g
                    .isotropy(x)?
                    .iter()
                    .map(|(arrow, m)| json!({ "arrow": arrow, "matrix": doc_rows(m) }))
                    .collect();
                rows.push(json!({ "point": x, "isotropy": iso }));
            }
            done(report(json!({ "points": rows })))
        }
        StackCmd::Faithful { file } => {
            let g = load_groupoid(file)?;
            done(report(json!({ "faithful_monodromy": g.faithful_monodromy()? })))
        }
    }
}

fn doc_rows(m: &crate::IntMatrix) -> Value {
    json!(m.to_rows().iter().map(|r| r.iter().map(|x| doc::Int(x.clone())).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn trop_cmd(c: &TropCmd, emit_strata: bool) -> std::result::Result<Output, Failure> {
    match c {
        TropCmd::Eval { point, polynomial } => {
            let f = load_polynomial(polynomial)?;
            let (class, v) = match load_document(point)? {
                Document::Point(p) => ("gauss", gauss_valuation(&p.cone_point(None)?, &f)?),
                Document::ArcPoint(a) => ("arc", arc_valuation(&a.arc(None)?, &f)?),
                d => return Err(wrong_kind(point, &d, "point or arcpoint").into()),
            };
            done(report(json!({ "point_class": class, "valuation": format_value(&v) })))
        }
        TropCmd::Point { arcpoint } => {
            let a = load_arcpoint(arcpoint)?;
            let x = a.arc(None)?;
            let doc = match &a.point.carrier {
                Carrier::Fan(f) => {
                    let cp = trop_fan_point(f, a.point.chart, &x)?;
                    PointDoc::from_point(Carrier::Fan(f.clone()), cp.chart, &cp.point)
                }
                c => PointDoc::from_point(c.clone(), a.point.chart, &trop_point(&x)?),
            };
            done(Document::Point(doc))
        }
        TropCmd::Retract { arcpoint } => {
            let a = load_arcpoint(arcpoint)?;
            let g = retract(&a.arc(None)?)?;
            done(Document::Point(PointDoc::from_point(a.point.carrier.clone(), a.point.chart, &g.0)))
        }
        TropCmd::Eta { arcpoint, polynomial, pullback: which } => {
            let x = load_arcpoint(arcpoint)?.arc(None)?;
            let f = load_polynomial(polynomial)?;
            let which = match which {
                Which::Pi => Pullback::Projection,
                Which::Mu => Pullback::Action,
            };
            let v = eta_tensor_valuation(&x, &pullback(&f, which))?;
            done(report(json!({ "valuation": format_value(&v) })))
        }
        TropCmd::QuotientCheck { monoid, points, seed } => {
            let p = load_monoid(monoid)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let xs: Vec<_> = (0..*points).map(|_| random_arc(&mut rng, &p)).collect();
            let mut polys: Vec<MonPolynomial<Rational>> = (0..6).map(|_| random_polynomial(&mut rng, &p, 3)).collect();
            // 1 - χ^g cancels at arcs with c(g) = 1, u(g) = 0
            let zero = vec![BigInt::from(0); p.rank()];
            for g in p.generators() {
                polys.push(MonPolynomial::new(
                    &p,
                    [(zero.clone(), Rational::from_integer(1.into())), (g.clone(), Rational::from_integer((-1).into()))],
                )?);
            }
            let r = quotient_check(&p, &xs, &polys, *seed)?;
            let ok = r.passed();
            let mut out = json!({
                "seed": r.seed,
                "points": r.points,
                "polynomials": r.polynomials,
                "lemma_checks": r.lemma_checks,
                "unit_checks": r.unit_checks,
                "classes": r.classes,
                "trop_fibers": r.trop_fibers,
                "coequalizer_classes": r.coequalizer_classes,
                "counterexamples": r.counterexamples,
                "passed": ok,
            });
            if emit_strata {
                let us: Vec<ExtendedConePoint<Rational>> = xs.iter().map(trop_point).collect::<Result<_>>()?;
                let table: Vec<Value> =
                    strata(&p, &us).into_iter().map(|(prime, n)| json!({ "prime": prime, "points": n })).collect();
                out["strata"] = json!(table);
            }
            Ok(Output { doc: report(out), ok })
        }
    }
}
