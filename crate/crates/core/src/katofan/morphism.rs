use super::{FanPoint, KatoFan};
use crate::error::{Error, Result};
use crate::lattice::{self, Matrix};
use crate::monoid::{preimage_face, MonoidHom};
use crate::IntMatrix;

/// Chart `s` of the source lands in chart `target_chart` of the target; the
/// map is recorded contravariantly as `hom: P_target -> P_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMap {
    pub target_chart: usize,
    pub hom: MonoidHom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatoFanMorphism {
    source: KatoFan,
    target: KatoFan,
    maps: Vec<ChartMap>,
    point_map: Vec<usize>,
    /// Per source point: `M_target(f(x)) -> M_source(x)` between representatives.
    stalk_maps: Vec<IntMatrix>,
}

impl KatoFanMorphism {
    /// `maps[s] = (target chart, matrix of P_target -> P_s)`.
    pub fn new(source: KatoFan, target: KatoFan, maps: Vec<(usize, IntMatrix)>) -> Result<Self> {
        if maps.len() != source.charts().len() {
            return Err(Error::InvalidMorphism(format!(
                "{} chart maps for {} source charts",
                maps.len(),
                source.charts().len()
            )));
        }
        let mut chart_maps = Vec::with_capacity(maps.len());
        for (s, (t, m)) in maps.into_iter().enumerate() {
            if t >= target.charts().len() {
                return Err(Error::OutOfRange(format!("chart {s} maps to missing target chart {t}")));
            }
            let hom = MonoidHom::new(m, target.charts()[t].clone(), source.charts()[s].clone())
                .map_err(|e| Error::InvalidMorphism(format!("chart {s}: {e}")))?;
            chart_maps.push(ChartMap { target_chart: t, hom });
        }

        let mut point_map = Vec::with_capacity(source.points().len());
        let mut stalk_maps = Vec::with_capacity(source.points().len());
        for x in 0..source.points().len() {
            let mut image: Option<(usize, IntMatrix)> = None;
            for occ in source.occurrences(x) {
                let cm = &chart_maps[occ.chart];
                let pre = FanPoint { chart: cm.target_chart, face: preimage_face(&cm.hom, &occ.face) };
                let y = target.point_index(pre.chart, &pre.face).expect("preimage of a face is a face");
                let loc_s = source.local(&occ);
                let loc_t = target.local(&pre);
                let local = lattice::factor_through(&(loc_s.hom.matrix() * cm.hom.matrix()), loc_t.hom.matrix())
                    .expect("local monoid map descends");
                // bring both ends to the representatives
                let to_rep = lattice::unimodular_inverse(source.stalk_iso(x, &occ).expect("occurrence"))
                    .expect("stalk isos are invertible");
                let from_rep = target.stalk_iso(y, &pre).expect("occurrence");
                let y_map = &(&to_rep * &local) * from_rep;
                match &image {
                    None => image = Some((y, y_map)),
                    Some((y0, m0)) if *y0 == y && *m0 == y_map => {}
                    Some(_) => {
                        return Err(Error::InvalidMorphism(format!(
                            "chart maps disagree on the overlap at source point {x}"
                        )))
                    }
                }
            }
            let (y, m) = image.expect("every point has an occurrence");
            point_map.push(y);
            stalk_maps.push(m);
        }
        Ok(KatoFanMorphism { source, target, maps: chart_maps, point_map, stalk_maps })
    }

    pub fn identity(fan: &KatoFan) -> Self {
        let maps = fan.charts().iter().enumerate().map(|(c, p)| (c, Matrix::identity(p.rank()))).collect();
        KatoFanMorphism::new(fan.clone(), fan.clone(), maps).expect("identity is a morphism")
    }

    pub fn source(&self) -> &KatoFan {
        &self.source
    }

    pub fn target(&self) -> &KatoFan {
        &self.target
    }

    pub fn chart_maps(&self) -> &[ChartMap] {
        &self.maps
    }

    pub fn map_point(&self, x: usize) -> usize {
        self.point_map[x]
    }

    pub fn point_map(&self) -> &[usize] {
        &self.point_map
    }

    /// Local hom `M_target(f(x)) -> M_source(x)` at representatives.
    pub fn stalk_map(&self, x: usize) -> MonoidHom {
        MonoidHom::new_unchecked(
            self.target.local_monoid(self.point_map[x]).clone(),
            self.source.local_monoid(x).clone(),
            self.stalk_maps[x].clone(),
        )
    }

    /// Local isomorphism on every stalk.
    pub fn is_strict(&self) -> bool {
        (0..self.point_map.len()).all(|x| self.stalk_map(x).is_iso())
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.points().len()];
        for &y in &self.point_map {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Specialization-monotone point map (always true for valid morphisms;
    /// exposed for checks).
    pub fn is_monotone(&self) -> bool {
        let n = self.point_map.len();
        (0..n).all(|a| {
            (0..n).all(|b| !self.source.specializes(a, b) || self.target.specializes(self.point_map[a], self.point_map[b]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::katofan::spec_fan;
    use crate::monoid::{ints, AffineMonoid};

    fn m(rows: &[&[i64]], cols: usize) -> IntMatrix {
        Matrix::from_rows(cols, &rows.iter().map(|r| ints(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_is_strict() {
        let f = spec_fan(&AffineMonoid::free(2)).unwrap();
        let id = KatoFanMorphism::identity(&f);
        assert!(id.is_strict() && id.is_surjective() && id.is_monotone());
    }

    #[test]
    fn open_immersion_is_strict() {
        // Spec N -> Spec N^2 as D(e1); the sharp localization kills (1,0),
        // which is generator 1, and keeps (0,1)
        let n = spec_fan(&AffineMonoid::free(1)).unwrap();
        let n2 = spec_fan(&AffineMonoid::free(2)).unwrap();
        let f = KatoFanMorphism::new(n, n2, vec![(0, m(&[&[1, 0]], 2))]).unwrap();
        assert!(f.is_strict());
        assert!(!f.is_surjective());
        assert!(f.is_monotone());
    }

    #[test]
    fn doubling_is_not_strict() {
        let n = spec_fan(&AffineMonoid::free(1)).unwrap();
        let f = KatoFanMorphism::new(n.clone(), n, vec![(0, m(&[&[2]], 1))]).unwrap();
        assert!(!f.is_strict());
        assert!(f.is_surjective());
    }

    #[test]
    fn invalid_chart_map() {
        let n = spec_fan(&AffineMonoid::free(1)).unwrap();
        assert!(KatoFanMorphism::new(n.clone(), n, vec![(0, m(&[&[-1]], 1))]).is_err());
    }
}
