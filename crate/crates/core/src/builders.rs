//! Vertex sets of the local (LHV), no-signalling (NS) and Local-Friendliness
//! (LF) polytopes, in Collins-Gisin coordinates.
//!
//! An LF vertex is indexed by the friends' records `(c, d)` and an extreme
//! point `j` of the no-signalling polytope with one setting fewer per party.
//! Setting 1 of each party reads the friend's record deterministically; box
//! setting `k` is played as scenario setting `k + 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    dd_facets, dd_vertices, is_facet_of, GeometryError, HRepresentation, HalfSpace, Rational,
    RationalVector, VRepresentation,
};
use crate::scenario::{Behavior, Scenario, ScenarioError};

pub const DEFAULT_VERTEX_CAP: usize = 10_000;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{kind} polytope for {scenario:?} would have {count} vertices, over the cap of {cap}")]
    CapExceeded { kind: PolytopeKind, scenario: Scenario, count: usize, cap: usize },
    #[error("the LF construction needs at least two settings per party")]
    TooFewSettings,
    #[error("cross-validation failed: {0}")]
    CrossValidation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolytopeKind {
    Lhv,
    Ns,
    Lf,
}

impl fmt::Display for PolytopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lhv => "lhv",
            Self::Ns => "ns",
            Self::Lf => "lf",
        })
    }
}

impl FromStr for PolytopeKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lhv" | "local" => Ok(Self::Lhv),
            "ns" => Ok(Self::Ns),
            "lf" => Ok(Self::Lf),
            other => Err(format!("unknown model {other:?} (expected lhv, ns or lf)")),
        }
    }
}

/// A local deterministic strategy: setting → outcome.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy(pub Vec<usize>);

impl DeterministicStrategy {
    /// All `O^N` strategies, in lexicographic order.
    pub fn all(s: Scenario) -> Vec<Self> {
        let total = s.outcomes.pow(s.settings as u32);
        (0..total)
            .map(|mut k| {
                let mut v = vec![0; s.settings];
                for slot in v.iter_mut().rev() {
                    *slot = k % s.outcomes;
                    k /= s.outcomes;
                }
                Self(v)
            })
            .collect()
    }
}

/// Index of an LF vertex: friends' records and the embedded NS extreme point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LfVertexSpec {
    pub c: usize,
    pub d: usize,
    pub j: usize,
}

fn to_cg(b: &Behavior<Rational>) -> RationalVector {
    RationalVector::new(b.collins_gisin_unchecked())
}

pub fn lhv_behaviors(s: Scenario) -> Vec<Behavior<Rational>> {
    let strategies = DeterministicStrategy::all(s);
    let mut out = Vec::with_capacity(strategies.len() * strategies.len());
    for alice in &strategies {
        for bob in &strategies {
            out.push(Behavior::deterministic(s, &alice.0, &bob.0));
        }
    }
    out
}

/// The `O^N × O^N` deterministic behaviors, sorted.
pub fn lhv_vertices(s: Scenario) -> VRepresentation {
    let v: Vec<RationalVector> = lhv_behaviors(s).iter().map(to_cg).collect();
    VRepresentation::new(s.cg_dim(), v).expect("uniform dimension").sorted()
}

/// Positivity of every table entry, written over Collins-Gisin coordinates.
/// Normalization and no-signalling hold by construction of the coordinates.
pub fn ns_hrep(s: Scenario) -> HRepresentation {
    let dim = s.cg_dim();
    let zero = vec![Rational::from_integer(0.into()); dim];
    let base = Behavior::from_collins_gisin(s, &zero).expect("dimension matches");
    let columns: Vec<Behavior<Rational>> = (0..dim)
        .map(|k| {
            let mut e = zero.clone();
            e[k] = Rational::from_integer(1.into());
            Behavior::from_collins_gisin(s, &e).expect("dimension matches")
        })
        .collect();
    let rows = (0..s.table_len())
        .map(|i| {
            let constant = base.table()[i].clone();
            // entry = constant + lin·p >= 0  <=>  -lin·p <= constant
            let coeffs: Vec<Rational> = columns
                .iter()
                .map(|col| constant.clone() - col.table()[i].clone())
                .collect();
            HalfSpace::new(&coeffs, &constant)
        })
        .collect();
    HRepresentation::new(dim, rows).expect("uniform dimension")
}

pub fn ns_vertices(s: Scenario) -> Result<VRepresentation, BuildError> {
    Ok(dd_vertices(&ns_hrep(s))?.sorted())
}

/// LF vertices (sorted, duplicates merged) with every construction that produced each.
#[derive(Clone, Debug)]
pub struct LfVertices {
    pub vrep: VRepresentation,
    pub specs: Vec<Vec<LfVertexSpec>>,
    /// Extreme points of the embedded no-signalling polytope, indexed by `j`.
    pub boxes: VRepresentation,
}

/// Full behavior of the LF vertex `(c, d, box)`.
pub fn lf_vertex_behavior(
    s: Scenario,
    c: usize,
    d: usize,
    boxed: &Behavior<Rational>,
) -> Behavior<Rational> {
    let (n, o) = (s.settings, s.outcomes);
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    let mut table = vec![zero.clone(); s.table_len()];
    for x in 0..n {
        for y in 0..n {
            for a in 0..o {
                for b in 0..o {
                    let v = match (x, y) {
                        (0, 0) => {
                            if a == c && b == d {
                                one.clone()
                            } else {
                                zero.clone()
                            }
                        }
                        (0, _) if a == c => boxed.bob_marginal(0, y - 1, b),
                        (0, _) => zero.clone(),
                        (_, 0) if b == d => boxed.alice_marginal(x - 1, 0, a),
                        (_, 0) => zero.clone(),
                        _ => boxed.get(x - 1, y - 1, a, b).clone(),
                    };
                    table[s.index(x, y, a, b)] = v;
                }
            }
        }
    }
    Behavior::new(s, table).expect("LF vertex is normalized")
}

pub fn lf_vertices(s: Scenario) -> Result<LfVertices, BuildError> {
    if s.settings < 2 {
        return Err(BuildError::TooFewSettings);
    }
    let reduced = Scenario::new(s.settings - 1, s.outcomes)?;
    let boxes = ns_vertices(reduced)?;
    let box_behaviors: Vec<Behavior<Rational>> = boxes
        .vertices()
        .iter()
        .map(|v| Behavior::from_collins_gisin(reduced, v.entries()))
        .collect::<Result<_, _>>()?;
    let o = s.outcomes;
    let nboxes = box_behaviors.len();
    let specs: Vec<LfVertexSpec> = (0..o)
        .flat_map(|c| (0..o).flat_map(move |d| (0..nboxes).map(move |j| LfVertexSpec { c, d, j })))
        .collect();
    let points: Vec<(RationalVector, LfVertexSpec)> = specs
        .par_iter()
        .map(|&vs| (to_cg(&lf_vertex_behavior(s, vs.c, vs.d, &box_behaviors[vs.j])), vs))
        .collect();
    let mut merged: BTreeMap<RationalVector, Vec<LfVertexSpec>> = BTreeMap::new();
    for (p, vs) in points {
        merged.entry(p).or_default().push(vs);
    }
    let (vertices, specs): (Vec<_>, Vec<_>) = merged.into_iter().unzip();
    Ok(LfVertices {
        vrep: VRepresentation::new(s.cg_dim(), vertices)?,
        specs,
        boxes,
    })
}

/// Paired, cross-validated V- and H-representations.
#[derive(Clone, Debug)]
pub struct Polytope {
    pub kind: PolytopeKind,
    pub scenario: Scenario,
    pub vertices: VRepresentation,
    pub facets: HRepresentation,
}

fn check_cap(kind: PolytopeKind, scenario: Scenario, count: usize, cap: usize) -> Result<(), BuildError> {
    if count > cap {
        Err(BuildError::CapExceeded { kind, scenario, count, cap })
    } else {
        Ok(())
    }
}

pub fn build_polytope(kind: PolytopeKind, s: Scenario, cap: usize) -> Result<Polytope, BuildError> {
    let (vertices, facets) = match kind {
        PolytopeKind::Lhv => {
            let count = (s.outcomes as f64).powi(2 * s.settings as i32);
            check_cap(kind, s, count.min(usize::MAX as f64) as usize, cap)?;
            let v = lhv_vertices(s);
            let h = dd_facets(&v)?;
            (v, h)
        }
        PolytopeKind::Ns => {
            let h = ns_hrep(s);
            let v = ns_vertices(s)?;
            check_cap(kind, s, v.len(), cap)?;
            (v, h)
        }
        PolytopeKind::Lf => {
            let lf = lf_vertices(s)?;
            check_cap(kind, s, lf.vrep.len(), cap)?;
            let h = dd_facets(&lf.vrep)?;
            (lf.vrep, h)
        }
    };
    let facets = facets.sorted();
    cross_validate(&vertices, &facets)?;
    Ok(Polytope { kind, scenario: s, vertices, facets })
}

/// Every vertex satisfies every facet and every facet is tight on enough
/// affinely independent vertices.
pub fn cross_validate(v: &VRepresentation, h: &HRepresentation) -> Result<(), BuildError> {
    if let Some((i, _)) = h
        .rows()
        .par_iter()
        .enumerate()
        .find_any(|(_, r)| !v.vertices().iter().all(|x| r.satisfied_by(x)))
    {
        return Err(BuildError::CrossValidation(format!("facet {i} is violated by a vertex")));
    }
    if let Some((i, _)) = h.rows().par_iter().enumerate().find_any(|(_, r)| !is_facet_of(r, v)) {
        return Err(BuildError::CrossValidation(format!("row {i} is not facet-defining")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn s(n: usize, o: usize) -> Scenario {
        Scenario::new(n, o).unwrap()
    }

    #[test]
    fn strategy_enumeration() {
        let all = DeterministicStrategy::all(s(3, 2));
        assert_eq!(all.len(), 8);
        assert_eq!(all[1].0, vec![0, 0, 1]);
        assert_eq!(DeterministicStrategy::all(s(2, 3)).len(), 9);
    }

    #[test]
    fn lhv_counts() {
        assert_eq!(lhv_vertices(s(2, 2)).len(), 16);
        assert_eq!(lhv_vertices(s(3, 2)).len(), 64);
        assert_eq!(lhv_vertices(s(2, 3)).len(), 81);
        for b in lhv_behaviors(s(3, 2)) {
            assert!(b.check_no_signalling().passed);
        }
    }

    #[test]
    fn ns_single_setting_is_deterministic() {
        let v = ns_vertices(s(1, 2)).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.vertices().iter().all(|x| x.entries().iter().all(|c| c.is_zero() || c.is_one())));
    }

    #[test]
    fn ns_two_settings() {
        let v = ns_vertices(s(2, 2)).unwrap();
        assert_eq!(v.len(), 24);
        let deterministic = v
            .vertices()
            .iter()
            .filter(|x| x.entries().iter().all(|c| c.is_zero() || c.is_one()))
            .count();
        assert_eq!(deterministic, 16);
        let ns = v.vertex_set();
        assert!(lhv_vertices(s(2, 2)).vertices().iter().all(|x| ns.contains(x)));
    }

    #[test]
    fn lf_at_two_settings_is_lhv() {
        let lf = lf_vertices(s(2, 2)).unwrap();
        assert_eq!(lf.vrep.len(), 16);
        assert_eq!(lf.vrep.vertex_set(), lhv_vertices(s(2, 2)).vertex_set());
        assert!(matches!(lf_vertices(s(1, 2)), Err(BuildError::TooFewSettings)));
    }

    #[test]
    fn lf_three_settings_has_96_vertices() {
        let lf = lf_vertices(s(3, 2)).unwrap();
        assert_eq!(lf.boxes.len(), 24);
        assert_eq!(lf.vrep.len(), 96);
        assert!(lf.specs.iter().all(|v| v.len() == 1));
    }

    #[test]
    fn lf_vertices_read_the_friend_on_setting_one() {
        let sc = s(3, 2);
        let lf = lf_vertices(sc).unwrap();
        for (v, constructions) in lf.vrep.vertices().iter().zip(&lf.specs) {
            let b = Behavior::from_collins_gisin(sc, v.entries()).unwrap();
            assert!(b.check_no_signalling().passed);
            assert!(b.is_nonnegative());
            for vs in constructions {
                for y in 0..3 {
                    assert!(b.alice_marginal(0, y, vs.c).is_one());
                }
                for x in 0..3 {
                    assert!(b.bob_marginal(x, 0, vs.d).is_one());
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        match build_polytope(PolytopeKind::Lhv, s(3, 2), 10) {
            Err(BuildError::CapExceeded { count: 64, cap: 10, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_setting_polytopes() {
        let lhv = build_polytope(PolytopeKind::Lhv, s(2, 2), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(lhv.facets.len(), 24);
        let lf = build_polytope(PolytopeKind::Lf, s(2, 2), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(lf.facets, lhv.facets);
        let ns = build_polytope(PolytopeKind::Ns, s(2, 2), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(ns.facets.len(), 16);
        assert_eq!(ns.vertices.len(), 24);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("LF".parse::<PolytopeKind>().unwrap(), PolytopeKind::Lf);
        assert!("qm".parse::<PolytopeKind>().is_err());
    }
}
