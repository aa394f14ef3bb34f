//! Relabelings of parties, settings and outcomes.
//!
//! Setting `1` of each party (index 0) is the friend's setting and is never
//! moved. An op acts on a behavior by relabeling each party locally and then,
//! if `swap_parties` is set, exchanging Alice and Bob.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::rational::{Rational, RationalVector};
use crate::geometry::repr::{HRepresentation, VRepresentation};
use crate::scenario::{library, Behavior, Inequality, Prob, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("scenario mismatch: op acts on {expected:?}, got {found:?}")]
    ScenarioMismatch { expected: Scenario, found: Scenario },
    #[error("facet {index} matches none of the expected classes: {inequality}")]
    UnmatchedFacet { index: usize, inequality: String },
    #[error("inequalities are only defined for two outcomes")]
    UnsupportedOutcomes,
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelabelingOp {
    pub swap_parties: bool,
    /// `setting_perm_a[x]` is the new label of Alice's setting `x`.
    pub setting_perm_a: Vec<usize>,
    pub setting_perm_b: Vec<usize>,
    /// `outcome_perm_a[x][a]` is the new label of outcome `a` of setting `x`
    /// (indexed by the old setting).
    pub outcome_perm_a: Vec<Vec<usize>>,
    pub outcome_perm_b: Vec<Vec<usize>>,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// All tuples choosing one item of `choices` per slot.
fn product<T: Clone>(choices: &[T], slots: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    for _ in 0..slots {
        out = out
            .into_iter()
            .flat_map(|p| {
                choices.iter().map(move |c| {
                    let mut q = p.clone();
                    q.push(c.clone());
                    q
                })
            })
            .collect();
    }
    out
}

impl RelabelingOp {
    pub fn identity(s: Scenario) -> Self {
        let ident: Vec<usize> = (0..s.settings).collect();
        let outs: Vec<Vec<usize>> = vec![(0..s.outcomes).collect(); s.settings];
        Self {
            swap_parties: false,
            setting_perm_a: ident.clone(),
            setting_perm_b: ident,
            outcome_perm_a: outs.clone(),
            outcome_perm_b: outs,
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario { settings: self.setting_perm_a.len(), outcomes: self.outcome_perm_a[0].len() }
    }

    fn settings_of(&self, party: usize) -> &[usize] {
        if party == 0 { &self.setting_perm_a } else { &self.setting_perm_b }
    }

    fn outcomes_of(&self, party: usize) -> &[Vec<usize>] {
        if party == 0 { &self.outcome_perm_a } else { &self.outcome_perm_b }
    }

    /// Image of `(party, setting, outcome)`.
    pub fn map_position(&self, party: usize, x: usize, a: usize) -> (usize, usize, usize) {
        let p = if self.swap_parties { 1 - party } else { party };
        (p, self.settings_of(party)[x], self.outcomes_of(party)[x][a])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let s = self.scenario();
        let mut settings = [vec![0; s.settings], vec![0; s.settings]];
        let mut outcomes = [vec![vec![0; s.outcomes]; s.settings], vec![vec![0; s.outcomes]; s.settings]];
        for party in 0..2 {
            for x in 0..s.settings {
                for a in 0..s.outcomes {
                    let (p1, x1, a1) = other.map_position(party, x, a);
                    let (_, x2, a2) = self.map_position(p1, x1, a1);
                    settings[party][x] = x2;
                    outcomes[party][x][a] = a2;
                }
            }
        }
        let [setting_perm_a, setting_perm_b] = settings;
        let [outcome_perm_a, outcome_perm_b] = outcomes;
        Self {
            swap_parties: self.swap_parties ^ other.swap_parties,
            setting_perm_a,
            setting_perm_b,
            outcome_perm_a,
            outcome_perm_b,
        }
    }

    /// Whether outcome `0 ↔ 1` is exchanged on `(party, x)`; two outcomes only.
    fn flips(&self, party: usize, x: usize) -> i64 {
        if self.outcomes_of(party)[x][0] == 0 { 1 } else { -1 }
    }

    pub fn apply(&self, ineq: &Inequality) -> Result<Inequality, SymmetryError> {
        let s = self.scenario();
        if s.outcomes != 2 {
            return Err(SymmetryError::UnsupportedOutcomes);
        }
        if ineq.scenario() != s {
            return Err(SymmetryError::ScenarioMismatch { expected: s, found: ineq.scenario() });
        }
        let n = s.settings;
        let mut out = Inequality::zero(&ineq.label, n, ineq.bound);
        for x in 0..n {
            out.a[self.setting_perm_a[x]] = ineq.a[x] * self.flips(0, x);
            out.b[self.setting_perm_b[x]] = ineq.b[x] * self.flips(1, x);
        }
        for x in 0..n {
            for y in 0..n {
                out.ab[self.setting_perm_a[x]][self.setting_perm_b[y]] =
                    ineq.ab[x][y] * self.flips(0, x) * self.flips(1, y);
            }
        }
        if self.swap_parties {
            std::mem::swap(&mut out.a, &mut out.b);
            let t: Vec<Vec<i64>> = (0..n).map(|x| (0..n).map(|y| out.ab[y][x]).collect()).collect();
            out.ab = t;
        }
        Ok(out)
    }

    pub fn apply_behavior<T: Prob>(&self, b: &Behavior<T>) -> Result<Behavior<T>, SymmetryError> {
        let s = self.scenario();
        if b.scenario() != s {
            return Err(SymmetryError::ScenarioMismatch { expected: s, found: b.scenario() });
        }
        let mut table = b.table().to_vec();
        for x in 0..s.settings {
            for y in 0..s.settings {
                for a in 0..s.outcomes {
                    for bo in 0..s.outcomes {
                        let (_, xa, aa) = self.map_position(0, x, a);
                        let (_, yb, bb) = self.map_position(1, y, bo);
                        let idx = if self.swap_parties {
                            s.index(yb, xa, bb, aa)
                        } else {
                            s.index(xa, yb, aa, bb)
                        };
                        table[idx] = b.get(x, y, a, bo).clone();
                    }
                }
            }
        }
        Ok(Behavior::new(s, table)?)
    }

    /// Acts on a Collins-Gisin vertex.
    pub fn apply_vertex(&self, v: &RationalVector) -> Result<RationalVector, SymmetryError> {
        let b = Behavior::<Rational>::from_collins_gisin(self.scenario(), v.entries())?;
        Ok(self.apply_behavior(&b)?.cg_vector()?)
    }
}

/// Every relabeling that fixes setting 0 of both parties.
pub fn relabeling_group(s: Scenario) -> Vec<RelabelingOp> {
    let rest: Vec<usize> = (1..s.settings).collect();
    let setting_perms: Vec<Vec<usize>> = permutations(&rest)
        .into_iter()
        .map(|p| std::iter::once(0).chain(p).collect())
        .collect();
    let outcome_choices = permutations(&(0..s.outcomes).collect::<Vec<_>>());
    let outcome_tuples = product(&outcome_choices, s.settings);
    let mut group = Vec::new();
    for swap_parties in [false, true] {
        for sa in &setting_perms {
            for sb in &setting_perms {
                for oa in &outcome_tuples {
                    for ob in &outcome_tuples {
                        group.push(RelabelingOp {
                            swap_parties,
                            setting_perm_a: sa.clone(),
                            setting_perm_b: sb.clone(),
                            outcome_perm_a: oa.clone(),
                            outcome_perm_b: ob.clone(),
                        });
                    }
                }
            }
        }
    }
    group
}

/// The orbit element with the lexicographically smallest coefficient key.
pub fn canonical_form(ineq: &Inequality, group: &[RelabelingOp]) -> Result<Inequality, SymmetryError> {
    let mut best: Option<(Vec<i64>, Inequality)> = None;
    for op in group {
        let img = op.apply(ineq)?;
        let key = img.coefficient_key();
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, img));
        }
    }
    Ok(best.map(|(_, i)| i).unwrap_or_else(|| ineq.clone()))
}

/// Number of distinct images of `ineq` under `group`.
pub fn orbit_size(ineq: &Inequality, group: &[RelabelingOp]) -> Result<usize, SymmetryError> {
    let mut seen = std::collections::HashSet::new();
    for op in group {
        seen.insert(op.apply(ineq)?.coefficient_key());
    }
    Ok(seen.len())
}

#[derive(Clone, Debug, Serialize)]
pub struct FacetClass {
    pub label: String,
    #[serde(rename = "canonical")]
    pub representative: Inequality,
    pub multiplicity: usize,
    /// Indices into the facet list.
    pub members: Vec<usize>,
}

/// Splits `facets` into orbits under the relabeling group; orbits are ordered
/// by their smallest member index and labelled `orbit-k`.
pub fn orbits(facets: &HRepresentation, s: Scenario) -> Result<Vec<FacetClass>, SymmetryError> {
    if s.outcomes != 2 {
        return Err(SymmetryError::UnsupportedOutcomes);
    }
    if facets.dim() != s.cg_dim() {
        let found = Scenario::binary_from_cg_dim(facets.dim()).unwrap_or(Scenario { settings: 0, outcomes: 2 });
        return Err(SymmetryError::ScenarioMismatch { expected: s, found });
    }
    let group = relabeling_group(s);
    let canon: Vec<Inequality> = facets
        .rows()
        .par_iter()
        .map(|h| canonical_form(&Inequality::from_collins_gisin(h, s.settings, ""), &group))
        .collect::<Result<_, _>>()?;
    let mut by_key: BTreeMap<(Vec<i64>, i64), Vec<usize>> = BTreeMap::new();
    for (i, c) in canon.iter().enumerate() {
        by_key.entry((c.coefficient_key(), c.bound)).or_default().push(i);
    }
    let mut classes: Vec<FacetClass> = by_key
        .into_values()
        .map(|members| FacetClass {
            label: String::new(),
            representative: canon[members[0]].clone(),
            multiplicity: members.len(),
            members,
        })
        .collect();
    classes.sort_by_key(|c| c.members[0]);
    for (k, c) in classes.iter_mut().enumerate() {
        c.label = format!("orbit-{}", k + 1);
        c.representative.label = c.label.clone();
    }
    Ok(classes)
}

/// Orbits of `facets`, each matched to one of `reference` by canonical form
/// and returned in the order of `reference`.
pub fn classify_with(
    facets: &HRepresentation,
    s: Scenario,
    reference: &[Inequality],
) -> Result<Vec<FacetClass>, SymmetryError> {
    let group = relabeling_group(s);
    let refs: Vec<(usize, Inequality)> = reference
        .iter()
        .enumerate()
        .map(|(i, r)| Ok((i, canonical_form(&r.clone().normalized(), &group)?)))
        .collect::<Result<_, SymmetryError>>()?;
    let mut matched = Vec::new();
    for mut class in orbits(facets, s)? {
        let hit = refs.iter().find(|(_, r)| {
            r.coefficient_key() == class.representative.coefficient_key() && r.bound == class.representative.bound
        });
        match hit {
            Some((i, _)) => {
                class.label = reference[*i].label.clone();
                class.representative.label = class.label.clone();
                matched.push((*i, class));
            }
            None => {
                let index = class.members[0];
                let inequality = Inequality::from_collins_gisin(&facets.rows()[index], s.settings, "").pretty();
                return Err(SymmetryError::UnmatchedFacet { index, inequality });
            }
        }
    }
    matched.sort_by_key(|(i, _)| *i);
    Ok(matched.into_iter().map(|(_, c)| c).collect())
}

/// Orbits of `facets`; an orbit whose canonical form matches one of
/// `reference` takes its label, the rest keep `orbit-k`.
pub fn name_orbits(
    facets: &HRepresentation,
    s: Scenario,
    reference: &[Inequality],
) -> Result<Vec<FacetClass>, SymmetryError> {
    let group = relabeling_group(s);
    let mut classes = orbits(facets, s)?;
    for r in reference {
        let canon = canonical_form(&r.clone().normalized(), &group)?;
        for c in classes.iter_mut() {
            if c.representative.coefficient_key() == canon.coefficient_key() && c.representative.bound == canon.bound {
                c.label = r.label.clone();
                c.representative.label = r.label.clone();
            }
        }
    }
    Ok(classes)
}

/// Classes of the Local-Friendliness facets of `s` against the nine named
/// representatives.
pub fn classify(facets: &HRepresentation, s: Scenario) -> Result<Vec<FacetClass>, SymmetryError> {
    classify_with(facets, s, &library::lf_facet_classes())
}

/// Whether every op maps the vertex set onto itself.
pub fn preserves_vertices(group: &[RelabelingOp], v: &VRepresentation) -> Result<bool, SymmetryError> {
    let set = v.vertex_set();
    for op in group {
        for p in v.vertices() {
            if !set.contains(&op.apply_vertex(p)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational::int;
    use crate::scenario::library::*;
    use std::collections::HashSet;

    fn s32() -> Scenario {
        Scenario::new(3, 2).unwrap()
    }

    #[test]
    fn group_order_and_closure() {
        let g = relabeling_group(s32());
        assert_eq!(g.len(), 512);
        let set: HashSet<&RelabelingOp> = g.iter().collect();
        assert_eq!(set.len(), 512);
        for i in (0..512).step_by(37) {
            for j in (0..512).step_by(23) {
                assert!(set.contains(&g[i].compose(&g[j])));
            }
        }
        assert!(set.contains(&RelabelingOp::identity(s32())));
        assert_eq!(relabeling_group(Scenario::new(2, 3).unwrap()).len(), 2 * 36 * 36);
    }

    #[test]
    fn setting_zero_is_fixed() {
        for op in relabeling_group(s32()) {
            assert_eq!(op.setting_perm_a[0], 0);
            assert_eq!(op.setting_perm_b[0], 0);
        }
    }

    #[test]
    fn identity_is_trivial() {
        let id = RelabelingOp::identity(s32());
        for i in lf_facet_classes() {
            assert_eq!(id.apply(&i).unwrap(), i);
        }
    }

    #[test]
    fn party_swap_on_brukner() {
        let mut op = RelabelingOp::identity(s32());
        op.swap_parties = true;
        let img = op.apply(&brukner()).unwrap();
        assert_eq!(img.bound, 2);
        assert_eq!(img.ab[1][0], brukner().ab[0][1]);
        assert_eq!(img.ab[0][1], brukner().ab[1][0]);
    }

    #[test]
    fn outcome_flip_negates() {
        let mut op = RelabelingOp::identity(s32());
        op.outcome_perm_a[1] = vec![1, 0];
        let g = genuine_lf_1();
        let img = op.apply(&g).unwrap();
        assert_eq!(img.a[1], -g.a[1]);
        assert_eq!(img.a[0], g.a[0]);
        for y in 0..3 {
            assert_eq!(img.ab[1][y], -g.ab[1][y]);
            assert_eq!(img.ab[0][y], g.ab[0][y]);
        }
    }

    #[test]
    fn apply_is_compatible_with_behaviors() {
        let g = relabeling_group(s32());
        let sc = s32();
        let b = Behavior::deterministic(sc, &[0, 1, 1], &[1, 0, 1]).mix(
            &crate::geometry::rational::rat(1, 3),
            &Behavior::deterministic(sc, &[1, 1, 0], &[0, 0, 1]),
        )
        .unwrap();
        let ineq = genuine_lf_2();
        let before = ineq.evaluate(&b).unwrap();
        for op in g.iter().step_by(7) {
            let after = op.apply(&ineq).unwrap().evaluate(&op.apply_behavior(&b).unwrap()).unwrap();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn compose_matches_sequential_application() {
        let g = relabeling_group(s32());
        let ineq = genuine_lf_1();
        for (i, j) in [(3, 400), (511, 17), (256, 255), (100, 300)] {
            let seq = g[i].apply(&g[j].apply(&ineq).unwrap()).unwrap();
            assert_eq!(g[i].compose(&g[j]).apply(&ineq).unwrap(), seq);
        }
    }

    #[test]
    fn canonical_forms() {
        let g = relabeling_group(s32());
        let c = canonical_form(&brukner(), &g).unwrap();
        assert_eq!(canonical_form(&c, &g).unwrap(), c);
        let other = g[77].apply(&brukner()).unwrap();
        assert_eq!(canonical_form(&other, &g).unwrap().coefficient_key(), c.coefficient_key());
        let semi = canonical_form(&semi_brukner(), &g).unwrap();
        assert_ne!(semi.coefficient_key(), c.coefficient_key());
    }

    #[test]
    fn orbit_sizes_divide_group_order() {
        let g = relabeling_group(s32());
        for (i, m) in lf_facet_classes().iter().zip(LF_CLASS_MULTIPLICITIES) {
            let n = orbit_size(i, &g).unwrap();
            assert_eq!(512 % n, 0);
            assert_eq!(n, m, "{}", i.label);
        }
    }

    #[test]
    fn group_preserves_lf_vertices() {
        let v = crate::builders::lf_vertices(s32()).unwrap().vrep;
        let g = relabeling_group(s32());
        assert!(preserves_vertices(&g, &v).unwrap());
    }

    #[test]
    fn orbit_of_single_facet() {
        let g = relabeling_group(s32());
        let rows: HashSet<_> = g.iter().map(|op| op.apply(&positivity_11()).unwrap().to_collins_gisin()).collect();
        let h = HRepresentation::new(15, rows.into_iter().collect()).unwrap();
        let classes = classify(&h, s32()).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].label, POSITIVITY_11);
        assert_eq!(classes[0].multiplicity, 4);
        let lhs = classes[0].representative.evaluate(&Behavior::<Rational>::uniform(s32())).unwrap();
        assert_eq!(lhs, int(0));
    }

    #[test]
    fn lhv_facets_contain_a_non_lf_class() {
        let s = s32();
        let v = crate::builders::lhv_vertices(s);
        let h = crate::geometry::dd_facets(&v).unwrap();
        let mut reference = lf_facet_classes();
        reference.push(bell_non_lf());
        let named = name_orbits(&h, s, &reference).unwrap();
        assert_eq!(named.iter().map(|c| c.multiplicity).sum::<usize>(), h.len());
        assert!(named.iter().any(|c| c.label == BELL_NON_LF));
        let lf = crate::builders::build_polytope(crate::builders::PolytopeKind::Lf, s, 10_000).unwrap();
        assert!(classify_with(&lf.facets, s, &reference).unwrap().iter().all(|c| c.label != BELL_NON_LF));
    }

    #[test]
    fn unmatched_facet_is_reported() {
        let h = HRepresentation::new(15, vec![bell_non_lf().to_collins_gisin()]).unwrap();
        assert!(matches!(classify(&h, s32()), Err(SymmetryError::UnmatchedFacet { index: 0, .. })));
    }
}
