//! Kato fans glued from spectra of sharp fs monoids.
//!
//! A fan is a list of charts `Spec P_c` together with gluings that identify
//! the open `D(F_i) = Spec P̄_{F_i}` of one chart with `D(F_j)` of another
//! through an isomorphism of sharp localizations. A point of `Spec P` is a
//! prime, recorded here by its complementary face; points of the fan are
//! classes of `(chart, face)` pairs under the gluings.

mod morphism;
mod product;
mod toric;

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::{self, Matrix};
use crate::monoid::{face_hull, faces, is_face, preimage_face, sharp_localize, AffineMonoid, Face, Localization, MonoidHom, Vector};
use crate::IntMatrix;

pub use morphism::{ChartMap, KatoFanMorphism};
pub use product::{fiber_product, FiberProduct};
pub use toric::{from_toric_fan, toric_cones};

/// Identification of `D(face_i)` in chart `i` with `D(face_j)` in chart `j`;
/// `iso` maps `P̄_i,face_i` to `P̄_j,face_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub i: usize,
    pub face_i: Face,
    pub j: usize,
    pub face_j: Face,
    pub iso: IntMatrix,
}

/// A point of a fan, named by its canonical (smallest) chart representative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FanPoint {
    pub chart: usize,
    pub face: Face,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Stalk {
    /// Every chart-level occurrence of the point, with the isomorphism from
    /// the representative's local monoid to the occurrence's local monoid.
    members: BTreeMap<FanPoint, IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatoFan {
    charts: Vec<AffineMonoid>,
    saturations: Vec<MonoidHom>,
    gluings: Vec<Gluing>,
    /// Sharp localizations at every face of every chart.
    locals: Vec<BTreeMap<Face, Localization>>,
    points: Vec<FanPoint>,
    class_of: BTreeMap<FanPoint, usize>,
    stalks: Vec<Stalk>,
}

struct Edge {
    from: FanPoint,
    to: FanPoint,
    /// `M(from) -> M(to)`.
    iso: IntMatrix,
}

impl KatoFan {
    /// Validates and glues. Non-saturated charts are replaced by their
    /// saturations (see [`KatoFan::saturations`]).
    pub fn new(charts: Vec<AffineMonoid>, gluings: Vec<Gluing>) -> Result<Self> {
        let mut saturations = Vec::with_capacity(charts.len());
        let mut sat_charts = Vec::with_capacity(charts.len());
        for (c, p) in charts.into_iter().enumerate() {
            if !p.is_sharp() {
                return Err(Error::NotSharp(format!("chart {c}")));
            }
            let s = p.saturate();
            saturations.push(MonoidHom::new_unchecked(p, s.clone(), Matrix::identity(s.rank())));
            sat_charts.push(s);
        }
        let charts = sat_charts;

        let locals: Vec<BTreeMap<Face, Localization>> = charts
            .iter()
            .map(|p| {
                faces(p)
                    .into_iter()
                    .map(|f| {
                        let loc = sharp_localize(p, &f).expect("faces() returns faces");
                        (f, loc)
                    })
                    .collect()
            })
            .collect();

        let mut edges: Vec<Edge> = Vec::new();
        for (k, g) in gluings.iter().enumerate() {
            edges.extend(gluing_edges(k, g, &charts, &locals)?);
        }

        let mut fan = KatoFan {
            charts,
            saturations,
            gluings,
            locals,
            points: Vec::new(),
            class_of: BTreeMap::new(),
            stalks: Vec::new(),
        };
        fan.build_points(&edges)?;
        Ok(fan)
    }

    fn build_points(&mut self, edges: &[Edge]) -> Result<()> {
        let mut adj: BTreeMap<FanPoint, Vec<(FanPoint, IntMatrix)>> = BTreeMap::new();
        for (c, locs) in self.locals.iter().enumerate() {
            for f in locs.keys() {
                adj.entry(FanPoint { chart: c, face: f.clone() }).or_default();
            }
        }
        for e in edges {
            let inv = lattice::unimodular_inverse(&e.iso).expect("edge isos are unimodular");
            adj.get_mut(&e.from).expect("edge endpoint").push((e.to.clone(), e.iso.clone()));
            adj.get_mut(&e.to).expect("edge endpoint").push((e.from.clone(), inv));
        }

        // nodes are visited in sorted order, so each class starts at its minimum
        let nodes: Vec<FanPoint> = adj.keys().cloned().collect();
        for start in nodes {
            if self.class_of.contains_key(&start) {
                continue;
            }
            let idx = self.points.len();
            let dim = self.local(&start).monoid.rank();
            let mut members: BTreeMap<FanPoint, IntMatrix> = BTreeMap::new();
            members.insert(start.clone(), Matrix::identity(dim));
            let mut queue = VecDeque::from([start.clone()]);
            while let Some(a) = queue.pop_front() {
                let ta = members[&a].clone();
                for (b, e) in &adj[&a] {
                    let tb = e * &ta;
                    match members.get(b) {
                        Some(existing) if *existing != tb => {
                            return Err(Error::InvalidFan(format!(
                                "gluings violate the cocycle condition at chart {} face {:?}",
                                b.chart,
                                b.face.indices()
                            )));
                        }
                        Some(_) => {}
                        None => {
                            members.insert(b.clone(), tb);
                            queue.push_back(b.clone());
                        }
                    }
                }
            }
            let mut seen_charts = std::collections::BTreeSet::new();
            for m in members.keys() {
                if !seen_charts.insert(m.chart) {
                    return Err(Error::InvalidFan(format!("gluings identify two distinct points of chart {}", m.chart)));
                }
                self.class_of.insert(m.clone(), idx);
            }
            self.points.push(start);
            self.stalks.push(Stalk { members });
        }
        Ok(())
    }

    pub fn charts(&self) -> &[AffineMonoid] {
        &self.charts
    }

    /// Hom from each chart as given to the chart actually used (its saturation).
    pub fn saturations(&self) -> &[MonoidHom] {
        &self.saturations
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    /// Points, ordered by representative.
    pub fn points(&self) -> &[FanPoint] {
        &self.points
    }

    pub fn is_affine(&self) -> bool {
        self.charts.len() == 1
    }

    /// Faces of a chart, in canonical order.
    pub fn chart_faces(&self, chart: usize) -> Vec<Face> {
        self.locals[chart].keys().cloned().collect()
    }

    /// Index of the point through `face` of `chart`.
    pub fn point_index(&self, chart: usize, face: &Face) -> Option<usize> {
        self.class_of.get(&FanPoint { chart, face: face.clone() }).copied()
    }

    /// All chart-level occurrences of a point.
    pub fn occurrences(&self, point: usize) -> Vec<FanPoint> {
        self.stalks[point].members.keys().cloned().collect()
    }

    /// Sharp localization of a chart at one of its faces.
    pub fn local(&self, at: &FanPoint) -> &Localization {
        &self.locals[at.chart][&at.face]
    }

    /// Local sharp monoid of a point, at its representative.
    pub fn local_monoid(&self, point: usize) -> &AffineMonoid {
        &self.local(&self.points[point]).monoid
    }

    /// Isomorphism from the representative's local monoid to the local
    /// monoid of `occurrence`.
    pub fn stalk_iso(&self, point: usize, occurrence: &FanPoint) -> Option<&IntMatrix> {
        self.stalks[point].members.get(occurrence)
    }

    /// Prime of a point, as generator indices of its representative chart.
    pub fn prime(&self, point: usize) -> Vec<usize> {
        let p = &self.points[point];
        p.face.prime(&self.charts[p.chart])
    }

    /// Whether `b` lies in the closure of `a`.
    pub fn specializes(&self, a: usize, b: usize) -> bool {
        self.stalks[b].members.keys().any(|occ| {
            self.stalks[a]
                .members
                .keys()
                .any(|o| o.chart == occ.chart && occ.face.is_subset(&o.face))
        })
    }

    /// Points with no proper generization.
    pub fn generic_points(&self) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&p| (0..self.points.len()).all(|q| q == p || !self.specializes(q, p)))
            .collect()
    }
}

/// Single-chart fan `Spec P`.
pub fn spec_fan(p: &AffineMonoid) -> Result<KatoFan> {
    if !p.is_sharp() {
        return Err(Error::NotSharp("Spec of a non-sharp monoid".into()));
    }
    if !p.is_saturated() {
        return Err(Error::NotSaturated("Spec of a non-saturated monoid".into()));
    }
    KatoFan::new(vec![p.clone()], Vec::new())
}

/// Point of chart `j` matching the face `g ⊇ face_i` of chart `i`.
fn transport(g: &Face, p_i: &AffineMonoid, loc_i: &Localization, iso: &IntMatrix, loc_j: &Localization) -> Face {
    let images: Vec<Vector> = g.generators(p_i).iter().map(|v| iso.mul_vec(&loc_i.hom.apply(v))).collect();
    preimage_face(&loc_j.hom, &face_hull(&loc_j.monoid, &images))
}

fn gluing_edges(
    k: usize,
    g: &Gluing,
    charts: &[AffineMonoid],
    locals: &[BTreeMap<Face, Localization>],
) -> Result<Vec<Edge>> {
    let bad = |msg: String| Error::InvalidFan(format!("gluing {k}: {msg}"));
    if g.i >= charts.len() || g.j >= charts.len() {
        return Err(Error::OutOfRange(format!("gluing {k} refers to a missing chart")));
    }
    let (p_i, p_j) = (&charts[g.i], &charts[g.j]);
    if !is_face(p_i, &g.face_i) || !is_face(p_j, &g.face_j) {
        return Err(bad("glued subsets are not faces".into()));
    }
    let loc_i = &locals[g.i][&g.face_i];
    let loc_j = &locals[g.j][&g.face_j];
    let phi = MonoidHom::new(g.iso.clone(), loc_i.monoid.clone(), loc_j.monoid.clone())
        .map_err(|e| bad(e.to_string()))?;
    if !phi.is_iso() {
        return Err(bad("gluing map is not an isomorphism".into()));
    }
    let sec_j = lattice::right_inverse(loc_j.hom.matrix()).expect("localization is surjective");
    // P_i^gp -> (P̄_j,face_j)^gp -> P_j^gp (mod face_j)
    let lift = &(&sec_j * &g.iso) * loc_i.hom.matrix();

    let mut out = Vec::new();
    for (face, loc_g) in &locals[g.i] {
        if !g.face_i.is_subset(face) {
            continue;
        }
        let image = transport(face, p_i, loc_i, &g.iso, loc_j);
        let loc_h = &locals[g.j][&image];
        let e = lattice::factor_through(&(loc_h.hom.matrix() * &lift), loc_g.hom.matrix())
            .ok_or_else(|| bad("gluing does not descend to local monoids".into()))?;
        if !MonoidHom::new_unchecked(loc_g.monoid.clone(), loc_h.monoid.clone(), e.clone()).is_iso() {
            return Err(bad("induced map on local monoids is not an isomorphism".into()));
        }
        out.push(Edge {
            from: FanPoint { chart: g.i, face: face.clone() },
            to: FanPoint { chart: g.j, face: image },
            iso: e,
        });
    }
    Ok(out)
}
