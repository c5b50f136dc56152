//! Independent oracles and randomized check suites.
//!
//! The oracles deliberately avoid the code paths they check: cone membership
//! by Carathéodory (nonnegative solutions on independent subsets), group
//! membership by gcds of maximal minors, monoid elements by breadth-first
//! enumeration in a box, faces by scanning all generator subsets with a
//! supporting-functional feasibility test. Every suite is driven by a
//! ChaCha8 stream seeded from `--seed`.

use std::collections::{BTreeSet, VecDeque};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conecomplex::{
    coequalize, complex_points_equal, reduction_map, structure_map, ComplexPoint, ExtendedConePoint, ExtendedNonneg,
};
use crate::error::{Error, Result};
use crate::fm::{feasible, Constraint};
use crate::katofan::{from_toric_fan, spec_fan};
use crate::lattice::{self, determinant, Matrix};
use crate::linalg;
use crate::monoid::{
    cone_facets, face_functional, faces, fs_pushout, in_cone, is_face, make_monoid, make_monoid_with_embedding,
    AffineMonoid, Face, MonoidHom, Vector,
};
use crate::stack::{classifying_groupoid, twisted_product, GroupAction, DEFAULT_MAX_ORBIT};
use crate::trop::{
    arc_valuation, eta_tensor_valuation, gauss_point, gauss_valuation, pullback, quotient_check, retract, trop_fan_point,
    trop_gauss, trop_point, ArcPoint, MonPolynomial, Pullback,
};
use crate::IntMatrix;

type Q = BigRational;
type E = ExtendedNonneg<Q>;

pub const SUITES: &[&str] = &[
    "saturation",
    "faces",
    "pushout",
    "strata",
    "multiplicativity",
    "eta",
    "retraction",
    "quotient",
    "twisted",
    "toric",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    /// Sorted.
    pub failures: Vec<String>,
    /// Named counters worth reporting (e.g. how many cancellations were seen).
    pub stats: Vec<(String, usize)>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64) -> Self {
        SuiteReport { suite: suite.into(), seed, ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        // keep reports readable when something goes badly wrong
        if self.failures.len() < 50 {
            self.failures.push(msg);
        }
    }

    fn finish(mut self) -> Self {
        self.failures.sort();
        self
    }
}

/// Runs a suite at its standard size.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "saturation" => saturation_suite(seed, 200),
        "faces" => faces_suite(seed, 100),
        "pushout" => pushout_suite(seed, 50, 20),
        "strata" => strata_suite(seed, 1000),
        "multiplicativity" => multiplicativity_suite(seed, 1000),
        "eta" => eta_suite(seed, 1000),
        "retraction" => retraction_suite(seed, 1000),
        "quotient" => quotient_suite(seed, 500),
        "twisted" => twisted_suite(seed, 200),
        "toric" => toric_suite(seed),
        _ => Err(Error::Document(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", ")))),
    }
}

// ---------------------------------------------------------------- oracles

fn q(a: i64, b: i64) -> Q {
    Q::new(a.into(), b.into())
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

/// `v ∈ cone(gens)`: some linearly independent subset writes `v` with
/// nonnegative coefficients (Carathéodory). Left inverses of the
/// independent subsets are prepared once.
pub struct ConeOracle {
    /// `(A, L, D)` with `L A = D·1`, `D > 0`, all integral.
    pieces: Vec<(Matrix<BigInt>, Matrix<BigInt>, BigInt)>,
}

impl ConeOracle {
    pub fn new(gens: &[Vector]) -> Self {
        let Some(d) = gens.first().map(Vec::len) else { return ConeOracle { pieces: Vec::new() } };
        let mut pieces = Vec::new();
        for k in 1..=d.min(gens.len()) {
            for subset in (0..gens.len()).combinations(k) {
                let cols: Vec<Vector> = subset.iter().map(|&i| gens[i].clone()).collect();
                let a_int = Matrix::from_columns(d, &cols).expect("generator length");
                let a: Matrix<Q> = linalg::to_field(&a_int);
                if linalg::field_rank(&a) < k {
                    continue;
                }
                // L = (AᵀA)⁻¹ Aᵀ, cleared of denominators
                let at = a.transpose();
                let ata = &at * &a;
                let cols: Vec<Vec<Q>> = (0..d)
                    .map(|j| linalg::solve(&ata, &at.column(j)).expect("Gram matrix is invertible"))
                    .collect();
                let den = cols.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
                let cols: Vec<Vector> =
                    cols.iter().map(|c| c.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect()).collect();
                pieces.push((a_int, Matrix::from_columns(k, &cols).expect("shape"), den));
            }
        }
        ConeOracle { pieces }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        self.pieces.iter().any(|(a, l, den)| {
            let x = l.mul_vec(v);
            x.iter().all(|c| !c.is_negative())
                && a.mul_vec(&x).iter().zip(v).all(|(ax, vi)| *ax == vi * den)
        })
    }
}

pub fn cone_contains_oracle(gens: &[Vector], v: &[BigInt]) -> bool {
    ConeOracle::new(gens).contains(v)
}

/// gcd of the `r × r` minors of the rows, `r` the rank.
fn minors_gcd(rows: &[Vector], r: usize, d: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rs in (0..rows.len()).combinations(r) {
        for cs in (0..d).combinations(r) {
            let m: Vec<Vector> = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect()).collect();
            g = g.gcd(&determinant(&Matrix::from_rows(r, &m).expect("square")));
        }
    }
    g
}

/// `v ∈ Z·gens`: adding `v` keeps the rank and the gcd of maximal minors.
pub struct GroupOracle {
    gens: Vec<Vector>,
    rank: usize,
    gcd: BigInt,
}

impl GroupOracle {
    pub fn new(gens: &[Vector]) -> Self {
        let gens: Vec<Vector> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
        let Some(d) = gens.first().map(Vec::len) else {
            return GroupOracle { gens, rank: 0, gcd: BigInt::one() };
        };
        let rank = linalg::field_rank::<Q>(&linalg::to_field(&Matrix::from_rows(d, &gens).unwrap()));
        let gcd = minors_gcd(&gens, rank, d);
        GroupOracle { gens, rank, gcd }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        if self.gens.is_empty() {
            return false;
        }
        let d = v.len();
        let mut ext = self.gens.clone();
        ext.push(v.to_vec());
        let r = linalg::field_rank::<Q>(&linalg::to_field(&Matrix::from_rows(d, &ext).unwrap()));
        // the minors not involving v are already accounted for in self.gcd
        r == self.rank && {
            let n = ext.len();
            let mut g = self.gcd.clone();
            for rs in (0..n - 1).combinations(self.rank - 1) {
                let mut rows: Vec<&Vector> = rs.iter().map(|&i| &ext[i]).collect();
                rows.push(&ext[n - 1]);
                for cs in (0..d).combinations(self.rank) {
                    let m: Vec<Vector> = rows.iter().map(|row| cs.iter().map(|&j| row[j].clone()).collect()).collect();
                    g = g.gcd(&determinant(&Matrix::from_rows(self.rank, &m).expect("square")));
                }
            }
            g == self.gcd
        }
    }
}

pub fn group_contains_oracle(gens: &[Vector], v: &[BigInt]) -> bool {
    GroupOracle::new(gens).contains(v)
}

/// All elements of the monoid generated by `gens` inside `[0, bound]^d`
/// (generators with nonnegative entries), by breadth-first search.
pub fn enumerate_box(gens: &[Vector], d: usize, bound: i64) -> BTreeSet<Vector> {
    let inside = |v: &Vector| v.iter().all(|x| !x.is_negative() && *x <= int(bound));
    let start: Vector = vec![BigInt::zero(); d];
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for g in gens {
            let w: Vector = v.iter().zip(g).map(|(a, b)| a + b).collect();
            if inside(&w) && seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Faces of a sharp monoid by scanning all generator subsets: `S` is a face
/// iff some `φ` has `φ = 0` on `S` and `φ ≥ 1` on the other generators.
pub fn faces_oracle(p: &AffineMonoid) -> Vec<Face> {
    let gens = p.generators();
    let mut out = Vec::new();
    for mask in 0u32..(1 << gens.len()) {
        let cs: Vec<Constraint<Q>> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let c: Vec<Q> = linalg::vec_to_field(g);
                if mask & (1 << i) != 0 {
                    Constraint::eq(c, Q::zero())
                } else {
                    Constraint::ge(c, Q::one())
                }
            })
            .collect();
        if feasible(p.rank(), &cs) {
            out.push(Face::new((0..gens.len()).filter(|i| mask & (1 << i) != 0).collect()));
        }
    }
    out.sort();
    out
}

/// Basis of `{c : c · R = 0}` for the columns of `r`, scaled to integers.
fn integer_left_kernel(r: &IntMatrix) -> Vec<Vector> {
    // left kernel of R = kernel of Rᵀ; independent of the lattice code:
    // plain rational elimination, then clear denominators
    let rt: Matrix<Q> = linalg::to_field(&r.transpose());
    let n = rt.cols();
    let mut rows = rt.to_rows();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(p) = (row..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(row, p);
        let inv = Q::one() / rows[row][c].clone();
        for x in rows[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pr = rows[row].clone();
        for (i, rr) in rows.iter_mut().enumerate() {
            if i != row && !rr[c].is_zero() {
                let f = rr[c].clone();
                for (x, y) in rr.iter_mut().zip(&pr) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); n];
            v[f] = Q::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[k][f].clone();
            }
            let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

// ------------------------------------------------------------- generators

fn random_vector(rng: &mut ChaCha8Rng, d: usize, lo: i64, hi: i64) -> Vector {
    (0..d).map(|_| int(rng.gen_range(lo..=hi))).collect()
}

/// Raw generators: rank `1..=dmax`, `1..=gmax` vectors with entries in `[lo, hi]`.
pub fn random_generators(rng: &mut ChaCha8Rng, dmax: usize, gmax: usize, lo: i64, hi: i64) -> (usize, Vec<Vector>) {
    let d = rng.gen_range(1..=dmax);
    let k = rng.gen_range(1..=gmax);
    (d, (0..k).map(|_| random_vector(rng, d, lo, hi)).collect())
}

/// A random sharp monoid (not necessarily saturated).
pub fn random_sharp_monoid(rng: &mut ChaCha8Rng, dmax: usize, gmax: usize) -> AffineMonoid {
    for _ in 0..50 {
        let (d, gens) = random_generators(rng, dmax, gmax, -2, 4);
        let m = make_monoid(d, &gens).expect("consistent lengths");
        if m.is_sharp() {
            return m;
        }
    }
    let (d, gens) = random_generators(rng, dmax, gmax, 0, 4);
    make_monoid(d, &gens).expect("consistent lengths")
}

/// A random sharp fs monoid of rank `<= dmax`.
pub fn random_fs_monoid(rng: &mut ChaCha8Rng, dmax: usize, gmax: usize) -> AffineMonoid {
    random_sharp_monoid(rng, dmax, gmax).saturate()
}

/// A random element: nonnegative combination of the generators.
pub fn random_element(rng: &mut ChaCha8Rng, p: &AffineMonoid, max_coeff: i64) -> Vector {
    let mut v = vec![BigInt::zero(); p.rank()];
    for g in p.generators() {
        let c = int(rng.gen_range(0..=max_coeff));
        for (x, y) in v.iter_mut().zip(g) {
            *x += &c * y;
        }
    }
    v
}

/// Zero, a generator, or a sum of two generators.
fn random_small_element(rng: &mut ChaCha8Rng, p: &AffineMonoid) -> Vector {
    let mut v = vec![BigInt::zero(); p.rank()];
    for _ in 0..rng.gen_range(0..=2) {
        if let Some(g) = p.generators().choose(rng) {
            for (x, y) in v.iter_mut().zip(g) {
                *x += y;
            }
        }
    }
    v
}

fn random_weight(rng: &mut ChaCha8Rng) -> Q {
    [q(0, 1), q(1, 2), q(1, 1), q(2, 1), q(3, 1)].choose(rng).unwrap().clone()
}

/// A random point of `σ̄_P`: a random face is finite, with a nonnegative
/// combination of facet normals as functional (zero a third of the time).
pub fn random_cone_point(rng: &mut ChaCha8Rng, p: &AffineMonoid) -> ExtendedConePoint<Q> {
    let fs = faces(p);
    let face = if rng.gen_bool(0.5) { Face::whole(p) } else { fs.choose(rng).unwrap().clone() };
    let mut y = vec![Q::zero(); p.rank()];
    if !rng.gen_bool(1.0 / 3.0) {
        for f in p.facets() {
            let w = random_weight(rng);
            for (a, b) in y.iter_mut().zip(f) {
                *a += w.clone() * Q::from_integer(b.clone());
            }
        }
    }
    ExtendedConePoint::from_functional(p, &face.prime(p), &y).expect("functional is nonnegative on P")
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Q {
    [q(1, 1), q(1, 1), q(-1, 1), q(2, 1), q(-2, 1), q(1, 3)].choose(rng).unwrap().clone()
}

pub fn random_arc(rng: &mut ChaCha8Rng, p: &AffineMonoid) -> ArcPoint<Q> {
    let u = random_cone_point(rng, p);
    let n = ArcPoint::unit(u.clone()).basis().len();
    let c = if rng.gen_bool(0.3) {
        vec![Q::one(); n]
    } else {
        (0..n).map(|_| [q(1, 1), q(-1, 1), q(2, 1), q(1, 2)].choose(rng).unwrap().clone()).collect()
    };
    ArcPoint::new(u, c).expect("nonzero coefficients")
}

pub fn random_polynomial(rng: &mut ChaCha8Rng, p: &AffineMonoid, max_terms: usize) -> MonPolynomial<Q> {
    let n = rng.gen_range(0..=max_terms);
    let terms: Vec<(Vector, Q)> = (0..n).map(|_| (random_element(rng, p, 2), random_coeff(rng))).collect();
    MonPolynomial::new(p, terms).expect("elements of P")
}

fn sample_pool() -> Vec<AffineMonoid> {
    let v = |x: &[i64]| x.iter().map(|&a| int(a)).collect::<Vector>();
    vec![
        AffineMonoid::free(1),
        AffineMonoid::free(2),
        AffineMonoid::free(3),
        make_monoid(2, &[v(&[1, 0]), v(&[1, 1]), v(&[1, 2])]).unwrap(),
        make_monoid(3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1]), v(&[1, 1, -1])]).unwrap().saturate(),
    ]
}

fn pick_monoid(rng: &mut ChaCha8Rng, pool: &[AffineMonoid]) -> AffineMonoid {
    if rng.gen_bool(0.2) {
        random_fs_monoid(rng, 3, 4)
    } else {
        pool.choose(rng).unwrap().clone()
    }
}

// ----------------------------------------------------------------- suites

/// `saturate(P)` against `cone(P) ∩ P^gp` on the box `[0, 8]^d`.
pub fn saturation_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("saturation", seed);
    let mut box_points = 0;
    for case in 0..count {
        let (d, gens) = random_generators(&mut rng, 3, 5, 0, 4);
        let (p, emb) = make_monoid_with_embedding(d, &gens)?;
        let sat = p.saturate();
        if !sat.is_saturated() {
            rep.fail(format!("case {case}: saturate({gens:?}) is not saturated"));
        }
        let elements = enumerate_box(&gens, d, 8);
        let (cone, group) = (ConeOracle::new(&gens), GroupOracle::new(&gens));
        for v in (0..d).map(|_| 0..=8i64).multi_cartesian_product() {
            let v: Vector = v.into_iter().map(int).collect();
            let expected = cone.contains(&v) && group.contains(&v);
            let got = emb.coords(&v).is_some_and(|c| sat.contains(&c));
            if expected != got {
                rep.fail(format!("case {case}: gens {gens:?}, {v:?}: oracle {expected}, saturate {got}"));
            }
            if elements.contains(&v) && !got {
                rep.fail(format!("case {case}: {v:?} is in P but not in its saturation"));
            }
            box_points += 1;
        }
        rep.cases += 1;
    }
    rep.stats.push(("box_points".into(), box_points));
    Ok(rep.finish())
}

/// `faces(P)` against the subset scan.
pub fn faces_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("faces", seed);
    let mut total = 0;
    for case in 0..count {
        let p = random_sharp_monoid(&mut rng, 3, 7);
        let got = faces(&p);
        let expected = faces_oracle(&p);
        if got != expected {
            rep.fail(format!("case {case}: {:?}: faces {got:?}, oracle {expected:?}", p.generators()));
        }
        for f in &got {
            if !is_face(&p, f) {
                rep.fail(format!("case {case}: {f:?} fails is_face"));
            }
        }
        total += got.len();
        rep.cases += 1;
    }
    rep.stats.push(("faces".into(), total));
    Ok(rep.finish())
}

fn matrix_from_columns(rows: usize, cols: &[Vector]) -> IntMatrix {
    Matrix::from_columns(rows, cols).expect("column length")
}

/// Universal property of the fs pushout against random commuting targets.
pub fn pushout_suite(seed: u64, cospans: usize, targets: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("pushout", seed);

    // N <-(×2)- N -(×3)-> N
    let n = AffineMonoid::free(1);
    let by = |k: i64| MonoidHom::new(Matrix::from_rows(1, &[vec![int(k)]]).unwrap(), n.clone(), n.clone());
    let po = fs_pushout(&by(2)?, &by(3)?)?;
    if po.monoid != n || po.left.matrix() != by(3)?.matrix() || po.right.matrix() != by(2)?.matrix() {
        rep.fail(format!(
            "worked instance: got {:?} with insertions {:?}, {:?}",
            po.monoid.generators(),
            po.left.matrix(),
            po.right.matrix()
        ));
    }

    let mut checked = 0;
    for case in 0..cospans {
        let s = AffineMonoid::free(rng.gen_range(1..=2));
        let p = random_fs_monoid(&mut rng, 3, 4);
        let qm = random_fs_monoid(&mut rng, 2, 4);
        let cols1: Vec<Vector> = (0..s.rank()).map(|_| random_small_element(&mut rng, &p)).collect();
        let cols2: Vec<Vector> = (0..s.rank()).map(|_| random_small_element(&mut rng, &qm)).collect();
        let h1 = MonoidHom::new(matrix_from_columns(p.rank(), &cols1), s.clone(), p.clone())?;
        let h2 = MonoidHom::new(matrix_from_columns(qm.rank(), &cols2), s.clone(), qm.clone())?;
        let po = fs_pushout(&h1, &h2)?;
        if &(po.left.matrix() * h1.matrix()) != &(po.right.matrix() * h2.matrix()) {
            rep.fail(format!("cospan {case}: square does not commute"));
            continue;
        }
        if !po.monoid.is_saturated() {
            rep.fail(format!("cospan {case}: pushout is not saturated"));
        }
        // commuting pairs (a, b): integer combinations of the left kernel of
        // the relations (h1 e_j, −h2 e_j)
        let (pr, qr) = (p.rank(), qm.rank());
        let rel_cols: Vec<Vector> = (0..s.rank())
            .map(|j| {
                let mut c = h1.matrix().column(j);
                c.extend(h2.matrix().column(j).into_iter().map(|x| -x));
                c
            })
            .collect();
        let kernel = integer_left_kernel(&matrix_from_columns(pr + qr, &rel_cols));
        let lr = po.left.matrix().hstack(po.right.matrix())?;
        let lr_q: Matrix<Q> = linalg::to_field(&lr.transpose());
        if linalg::field_rank(&lr_q) != po.monoid.rank() {
            rep.fail(format!("cospan {case}: insertions do not generate the pushout group"));
            continue;
        }
        for t in 0..targets {
            let k = rng.gen_range(1..=3);
            let c_rows: Vec<Vector> = (0..k)
                .map(|_| {
                    let mut row = vec![BigInt::zero(); pr + qr];
                    for kv in &kernel {
                        let w = int(rng.gen_range(-2..=2));
                        for (x, y) in row.iter_mut().zip(kv) {
                            *x += &w * y;
                        }
                    }
                    row
                })
                .collect();
            let c = Matrix::from_rows(pr + qr, &c_rows)?;
            let a = c.select_columns(&(0..pr).collect::<Vec<_>>());
            let b = c.select_columns(&(pr..pr + qr).collect::<Vec<_>>());
            let mut raw: Vec<Vector> = p.generators().iter().map(|g| a.mul_vec(g)).collect();
            raw.extend(qm.generators().iter().map(|g| b.mul_vec(g)));
            for _ in 0..rng.gen_range(0..=2) {
                raw.push(random_vector(&mut rng, k, 0, 3));
            }
            // sat(W) is decided by its cone and group; no Hilbert basis needed
            let w_basis = lattice::hermite_basis(k, &raw);
            let w_rank = w_basis.len();
            let coords = |v: &[BigInt]| lattice::lattice_membership(&w_basis, v).ok().flatten();
            let raw_coords: Vec<Vector> = raw.iter().map(|v| coords(v).expect("generator in its group")).collect();
            let w_facets = cone_facets(w_rank, &raw_coords);
            let in_w = |c: &[BigInt]| in_cone(&w_facets, c);
            let to_w = |m: &IntMatrix, r: usize| -> Option<IntMatrix> {
                let cols: Option<Vec<Vector>> = (0..r).map(|j| coords(&m.column(j))).collect();
                Some(matrix_from_columns(w_rank, &cols?))
            };
            let (Some(aw), Some(bw)) = (to_w(&a, pr), to_w(&b, qr)) else {
                rep.fail(format!("cospan {case}, target {t}: maps leave the target group"));
                continue;
            };
            let maps_into = |m: &IntMatrix, src: &AffineMonoid| src.generators().iter().all(|g| in_w(&m.mul_vec(g)));
            if !maps_into(&aw, &p) || !maps_into(&bw, &qm) {
                rep.fail(format!("cospan {case}, target {t}: test maps are not monoid maps"));
                continue;
            }
            // u · [left | right] = [aw | bw], row by row
            let rhs = aw.hstack(&bw)?;
            let mut u_rows: Vec<Vector> = Vec::with_capacity(w_rank);
            let mut ok = true;
            for i in 0..w_rank {
                let target: Vec<Q> = linalg::vec_to_field(rhs.row(i));
                match linalg::solve(&lr_q, &target) {
                    Some(x) if x.iter().all(|v| v.is_integer()) => u_rows.push(x.iter().map(|v| v.to_integer()).collect()),
                    Some(_) => {
                        rep.fail(format!("cospan {case}, target {t}: factoring map is not integral"));
                        ok = false;
                        break;
                    }
                    None => {
                        rep.fail(format!("cospan {case}, target {t}: no factoring map"));
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let u = Matrix::from_rows(po.monoid.rank(), &u_rows)?;
            if (&u * po.left.matrix()) != aw || (&u * po.right.matrix()) != bw {
                rep.fail(format!("cospan {case}, target {t}: factoring map does not factor"));
            }
            if !maps_into(&u, &po.monoid) {
                rep.fail(format!("cospan {case}, target {t}: factoring map leaves the target monoid"));
            }
            checked += 1;
        }
        rep.cases += 1;
    }
    rep.stats.push(("factorizations".into(), checked));
    Ok(rep.finish())
}

/// Point counts of `Spec N^k`, strata of `σ̄_P`, and `ρ`, `r` against arcs.
pub fn strata_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("strata", seed);
    for k in 1..=4 {
        let n = spec_fan(&AffineMonoid::free(k))?.points().len();
        if n != 1 << k {
            rep.fail(format!("Spec N^{k} has {n} points"));
        }
    }
    let pool = sample_pool();
    let mut monoids = pool.clone();
    monoids.extend((0..5).map(|_| random_fs_monoid(&mut rng, 3, 5)));
    for p in &monoids {
        let fs = faces(p);
        let mut seen = BTreeSet::new();
        for f in &fs {
            let phi: Vec<Q> = linalg::vec_to_field(&face_functional(p, f));
            let u = ExtendedConePoint::from_functional(p, &[], &phi)?;
            let r = reduction_map(&u);
            if r != f.prime(p) || !structure_map(&u).is_empty() {
                rep.fail(format!("{:?}: stratum of face {f:?} reduces to {r:?}", p.generators()));
            }
            seen.insert(r);
        }
        if seen.len() != fs.len() {
            rep.fail(format!("{:?}: {} strata for {} primes", p.generators(), seen.len(), fs.len()));
        }
    }
    let mut cancellations = 0;
    for i in 0..count {
        let p = pick_monoid(&mut rng, &pool);
        let x = random_arc(&mut rng, &p);
        let u = trop_point(&x)?;
        let (rho, r) = (structure_map(&u), reduction_map(&u));
        if !rho.iter().all(|g| r.contains(g)) {
            rep.fail(format!("sample {i}: rho {rho:?} not inside r {r:?}"));
        }
        for prime in [&rho, &r] {
            let comp = Face::new((0..p.generators().len()).filter(|g| !prime.contains(g)).collect());
            if !is_face(&p, &comp) {
                rep.fail(format!("sample {i}: {prime:?} is not a prime"));
            }
        }
        let mut inf = Vec::new();
        let mut pos = Vec::new();
        for (g, gen) in p.generators().iter().enumerate() {
            let v = arc_valuation(&x, &MonPolynomial::monomial(&p, gen.clone())?)?;
            if v.is_infinite() {
                inf.push(g);
            }
            if v.is_positive() {
                pos.push(g);
            }
        }
        if inf != rho || pos != r {
            rep.fail(format!("sample {i}: rho/r {rho:?}/{r:?} against arc {inf:?}/{pos:?}"));
        }
        if &u != x.exponents() {
            rep.fail(format!("sample {i}: trop differs from the exponent data"));
        }
        let f = random_polynomial(&mut rng, &p, 3);
        if arc_valuation(&x, &f)? != gauss_valuation(&u, &f)? {
            cancellations += 1;
        }
        rep.cases += 1;
    }
    rep.stats.push(("off_skeleton_values".into(), cancellations));
    Ok(rep.finish())
}

/// `val(fg) = val(f) + val(g)` for Gauss and arc points.
pub fn multiplicativity_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("multiplicativity", seed);
    let pool = sample_pool();
    let mut infinite = 0;
    for i in 0..count {
        let p = pick_monoid(&mut rng, &pool);
        let f = random_polynomial(&mut rng, &p, 4);
        let g = random_polynomial(&mut rng, &p, 4);
        let fg = f.mul(&g)?;

        let u = random_cone_point(&mut rng, &p);
        let (a, b, c) = (gauss_valuation(&u, &f)?, gauss_valuation(&u, &g)?, gauss_valuation(&u, &fg)?);
        if c != a.clone() + b.clone() {
            rep.fail(format!("gauss {i}: {c} != {a} + {b}"));
        }
        let x = random_arc(&mut rng, &p);
        let (a2, b2, c2) = (arc_valuation(&x, &f)?, arc_valuation(&x, &g)?, arc_valuation(&x, &fg)?);
        if c2 != a2.clone() + b2.clone() {
            rep.fail(format!("arc {i}: {c2} != {a2} + {b2}"));
        }
        for v in [&a, &b, &c, &a2, &b2, &c2] {
            if let Some(s) = v.finite() {
                if s.is_negative() {
                    rep.fail(format!("sample {i}: negative value {v}"));
                }
            }
        }
        if c2.is_infinite() && !fg.is_zero() {
            infinite += 1;
        }
        rep.cases += 2;
    }
    rep.stats.push(("arc_zero_values_of_nonzero_products".into(), infinite));
    Ok(rep.finish())
}

/// Pullbacks along `π` and `μ` of `η⊗̂x`.
pub fn eta_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("eta", seed);
    let pool = sample_pool();
    let mut differ = 0;
    for i in 0..count {
        let p = pick_monoid(&mut rng, &pool);
        let x = random_arc(&mut rng, &p);
        let f = random_polynomial(&mut rng, &p, 4);
        let direct = arc_valuation(&x, &f)?;
        let via_pi = eta_tensor_valuation(&x, &pullback(&f, Pullback::Projection))?;
        let via_mu = eta_tensor_valuation(&x, &pullback(&f, Pullback::Action))?;
        let gauss = retract(&x)?.valuation(&f)?;
        if via_pi != direct {
            rep.fail(format!("sample {i}: eta∘pi {via_pi} != arc {direct}"));
        }
        if via_mu != gauss {
            rep.fail(format!("sample {i}: eta∘mu {via_mu} != gauss∘retract {gauss}"));
        }
        if direct != gauss {
            differ += 1;
        }
        rep.cases += 1;
    }
    rep.stats.push(("pi_mu_differ".into(), differ));
    Ok(rep.finish())
}

/// `trop ∘ J = id`, idempotence of the retraction, and the evaluation point.
pub fn retraction_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("retraction", seed);
    let pool = sample_pool();
    for i in 0..count {
        let p = pick_monoid(&mut rng, &pool);
        let u = random_cone_point(&mut rng, &p);
        if trop_gauss(&gauss_point(&u))? != u {
            rep.fail(format!("sample {i}: trop J(u) != u"));
        }
        let x = random_arc(&mut rng, &p);
        let r = retract(&x)?;
        if retract(&ArcPoint::unit(r.0.clone()))? != r {
            rep.fail(format!("sample {i}: retraction is not idempotent"));
        }
        let f = random_polynomial(&mut rng, &p, 4);
        let (g, a) = (r.valuation(&f)?, arc_valuation(&x, &f)?);
        if g > a {
            rep.fail(format!("sample {i}: gauss {g} above arc {a}"));
        }
        let m = MonPolynomial::monomial(&p, random_element(&mut rng, &p, 3))?;
        if r.valuation(&m)? != arc_valuation(&x, &m)? {
            rep.fail(format!("sample {i}: retraction changes a monomial value"));
        }
        rep.cases += 1;
    }
    // u = 0, c = 1, f = 1 − χ
    let n = AffineMonoid::free(1);
    let ev = ArcPoint::new(ExtendedConePoint::zero(&n)?, vec![q(1, 1)])?;
    let f = MonPolynomial::new(&n, [(vec![int(0)], q(1, 1)), (vec![int(1)], q(-1, 1))])?;
    let (a, g) = (arc_valuation(&ev, &f)?, retract(&ev)?.valuation(&f)?);
    if a != E::Infinity || g != E::Finite(Q::zero()) {
        rep.fail(format!("evaluation point: arc {a}, gauss {g}"));
    }
    Ok(rep.finish())
}

/// Samples with few distinct exponent values so that fibers of `trop` have
/// several members, including evaluation-type points.
fn quotient_samples(rng: &mut ChaCha8Rng, p: &AffineMonoid, count: usize) -> Vec<ArcPoint<Q>> {
    let fs = faces(p);
    (0..count)
        .map(|_| {
            let face = fs.choose(rng).unwrap().clone();
            let y: Vec<Q> = (0..p.rank()).map(|_| [q(0, 1), q(1, 1), q(2, 1), q(1, 2)].choose(rng).unwrap().clone()).collect();
            // nonnegative on P because P ⊆ N^r for the monoids used here
            let u = ExtendedConePoint::from_functional(p, &face.prime(p), &y).expect("nonnegative functional");
            let n = ArcPoint::unit(u.clone()).basis().len();
            let c: Vec<Q> = (0..n).map(|_| [q(1, 1), q(1, 1), q(-1, 1), q(3, 1)].choose(rng).unwrap().clone()).collect();
            ArcPoint::new(u, c).expect("nonzero coefficients")
        })
        .collect()
}

/// `quotient_check` on `Spec N` and `Spec N²`.
pub fn quotient_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("quotient", seed);
    for k in 1..=2 {
        let p = AffineMonoid::free(k);
        let pts = quotient_samples(&mut rng, &p, count);
        let mut polys: Vec<MonPolynomial<Q>> = (0..6).map(|_| random_polynomial(&mut rng, &p, 3)).collect();
        let zero = vec![int(0); k];
        for g in p.generators() {
            polys.push(MonPolynomial::new(&p, [(zero.clone(), q(1, 1)), (g.clone(), q(-1, 1))])?);
        }
        let cancel = pts
            .iter()
            .filter(|x| polys.iter().any(|f| arc_valuation(x, f).ok() != retract(x).and_then(|r| r.valuation(f)).ok()))
            .count();
        let r = quotient_check(&p, &pts, &polys, seed)?;
        for c in &r.counterexamples {
            rep.fail(format!("N^{k}: {c}"));
        }
        if r.trop_fibers >= pts.len() {
            rep.fail(format!("N^{k}: no two samples share a trop value; the check is vacuous"));
        }
        rep.stats.push((format!("n{k}_classes"), r.classes));
        rep.stats.push((format!("n{k}_cancellation_points"), cancel));
        rep.cases += pts.len();
    }
    Ok(rep.finish())
}

fn n2_point(a: &E, b: &E) -> Result<ExtendedConePoint<Q>> {
    // generators of N^2 are ordered (0,1), (1,0)
    ExtendedConePoint::from_values(&AffineMonoid::free(2), vec![b.clone(), a.clone()])
}

/// The swap on `Spec N²`, the trivial action and `BG`.
pub fn twisted_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("twisted", seed);
    let n2 = AffineMonoid::free(2);
    let swap = Matrix::from_rows(2, &[vec![int(0), int(1)], vec![int(1), int(0)]])?;
    let gr = twisted_product(&GroupAction::new(n2.clone(), vec![swap], DEFAULT_MAX_ORBIT)?)?;
    let report = gr.validate();
    for v in &report.violations {
        rep.fail(format!("swap: {v}"));
    }
    if !gr.faithful_monodromy()? {
        rep.fail("swap: monodromy is not faithful".into());
    }
    let values = [E::Finite(q(0, 1)), E::Finite(q(1, 1)), E::Finite(q(2, 1)), E::Finite(q(1, 2)), E::Infinity];
    let mut samples: Vec<(usize, usize, ComplexPoint<Q>)> = Vec::new();
    for _ in 0..count {
        let (i, j) = (rng.gen_range(0..values.len()), rng.gen_range(0..values.len()));
        samples.push((i, j, ComplexPoint::new(gr.u(), 0, n2_point(&values[i], &values[j])?)?));
    }
    let reps: Vec<ComplexPoint<Q>> =
        samples.iter().map(|(_, _, pt)| Ok(coequalize(&gr, pt)?.representative)).collect::<Result<_>>()?;
    for a in 0..samples.len() {
        let (i, j, _) = samples[a];
        let flipped = ComplexPoint::new(gr.u(), 0, n2_point(&values[j], &values[i])?)?;
        if coequalize(&gr, &flipped)?.representative != reps[a] {
            rep.fail(format!("({i},{j}) and ({j},{i}) are not identified"));
        }
        for b in a + 1..samples.len() {
            let (k, l, _) = samples[b];
            let same_pair = (i, j) == (k, l) || (i, j) == (l, k);
            if same_pair != (reps[a] == reps[b]) {
                rep.fail(format!("pairs ({i},{j}) and ({k},{l}): identified {}", reps[a] == reps[b]));
            }
        }
        rep.cases += 1;
    }

    let triv = twisted_product(&GroupAction::new(n2.clone(), vec![Matrix::identity(2)], DEFAULT_MAX_ORBIT)?)?;
    if triv.r() != triv.u() || !triv.s().chart_maps().iter().chain(triv.t().chart_maps()).all(|m| m.hom.matrix().is_identity()) {
        rep.fail("trivial action does not collapse to U".into());
    }
    let bg = classifying_groupoid(2)?;
    if !bg.validate().is_valid() {
        rep.fail("BG presentation is not a valid groupoid".into());
    }
    if bg.faithful_monodromy()? {
        rep.fail("BG presentation has faithful monodromy".into());
    }
    Ok(rep.finish())
}

/// The projective line: three fan points, two extended rays glued at the
/// origin, and tropicalization of an arc.
pub fn toric_suite(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("toric", seed);
    let fan = from_toric_fan(1, &[vec![vec![int(1)]], vec![vec![int(-1)]]])?;
    if fan.points().len() != 3 {
        rep.fail(format!("{} fan points", fan.points().len()));
    }
    let values = [E::Finite(q(0, 1)), E::Finite(q(1, 1)), E::Finite(q(2, 1)), E::Infinity];
    let mut pts = Vec::new();
    for chart in 0..2 {
        for v in &values {
            let u = ExtendedConePoint::from_values(&fan.charts()[chart], vec![v.clone()])?;
            pts.push(ComplexPoint::new(&fan, chart, u)?);
        }
    }
    let mut classes: Vec<&ComplexPoint<Q>> = Vec::new();
    for pt in &pts {
        let mut found = false;
        for c in &classes {
            if complex_points_equal(&fan, c, pt)? {
                found = true;
            }
        }
        if !found {
            classes.push(pt);
        }
    }
    // origin shared, everything else on its own ray
    if classes.len() != 2 * values.len() - 1 {
        rep.fail(format!("{} distinct points of the extended complex, expected {}", classes.len(), 2 * values.len() - 1));
    }
    for chart in 0..2 {
        let p = &fan.charts()[chart];
        let x = ArcPoint::new(ExtendedConePoint::from_values(p, vec![E::Finite(q(2, 1))])?, vec![q(1, 1)])?;
        let t = trop_fan_point(&fan, chart, &x)?;
        if t.point.values() != [E::Finite(q(2, 1))] {
            rep.fail(format!("chart {chart}: arc with u = 2 tropicalizes to {:?}", t.point.values()));
        }
        rep.cases += 1;
    }
    rep.cases += pts.len();
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vector {
        x.iter().map(|&a| int(a)).collect()
    }

    #[test]
    fn oracles_on_small_cases() {
        let g = vec![v(&[2, 0]), v(&[0, 2])];
        assert!(cone_contains_oracle(&g, &v(&[1, 1])));
        assert!(!group_contains_oracle(&g, &v(&[1, 1])));
        assert!(group_contains_oracle(&g, &v(&[2, 4])));
        assert!(!cone_contains_oracle(&g, &v(&[-1, 1])));
        let e = enumerate_box(&[v(&[2]), v(&[3])], 1, 6);
        assert_eq!(e.len(), 6); // 0, 2, 3, 4, 5, 6
        assert_eq!(faces_oracle(&AffineMonoid::free(2)).len(), 4);
    }

    #[test]
    fn left_kernel() {
        let r = Matrix::from_columns(2, &[v(&[2, -3])]).unwrap();
        let k = integer_left_kernel(&r);
        assert_eq!(k.len(), 1);
        assert_eq!(lattice::dot(&k[0], &v(&[2, -3])), int(0));
    }

    #[test]
    fn small_suites_pass() {
        for (name, r) in [
            ("saturation", saturation_suite(1, 5)),
            ("faces", faces_suite(1, 5)),
            ("pushout", pushout_suite(1, 3, 3)),
            ("toric", toric_suite(1)),
        ] {
            let r = r.unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures);
        }
    }
}
