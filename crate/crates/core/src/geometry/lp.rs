//! Exact two-phase simplex with Bland's rule, and the membership certificate
//! built on top of it.
//!
//! The solver works on standard form `min c·x  s.t.  A x = b, x >= 0`. Row
//! signs are flipped so that `b >= 0`, one artificial column is added per row,
//! and the artificial block of the tableau tracks the basis inverse, which is
//! what the dual vectors are read from.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::rational::{format_rational, Rational, RationalVector};
use super::repr::{HRepresentation, HalfSpace, VRepresentation};
use super::GeometryError;

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
        /// `y` with `c - Aᵀy >= 0` and `b·y = value`.
        duals: Vec<Rational>,
    },
    /// `z` with `Aᵀz <= 0` and `b·z > 0`.
    Infeasible { farkas: Vec<Rational> },
    Unbounded,
}

struct Tableau {
    m: usize,
    n: usize,
    /// m rows of length n + m (original columns, then artificials).
    t: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.n + self.m;
        let inv = Rational::one() / &self.t[row][col];
        for j in 0..width {
            if !self.t[row][j].is_zero() {
                self.t[row][j] = &self.t[row][j] * &inv;
            }
        }
        self.rhs[row] = &self.rhs[row] * &inv;
        let prow = self.t[row].clone();
        let prhs = self.rhs[row].clone();
        for i in 0..self.m {
            if i == row || self.t[i][col].is_zero() {
                continue;
            }
            let f = self.t[i][col].clone();
            for j in 0..width {
                if !prow[j].is_zero() {
                    let d = &f * &prow[j];
                    self.t[i][j] -= d;
                }
            }
            let d = &f * &prhs;
            self.rhs[i] -= d;
        }
        self.basis[row] = col;
    }

    /// `c_B B⁻¹`, in the (sign-flipped) tableau row space.
    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        (0..self.m)
            .map(|k| {
                (0..self.m).fold(Rational::zero(), |acc, i| {
                    let cb = &cost[self.basis[i]];
                    if cb.is_zero() {
                        acc
                    } else {
                        acc + cb * &self.t[i][self.n + k]
                    }
                })
            })
            .collect()
    }

    /// `c_j - c_B B⁻¹ A_j`, read off the current tableau.
    fn reduced_cost(&self, cost: &[Rational], col: usize) -> Rational {
        let mut r = cost[col].clone();
        for i in 0..self.m {
            let cb = &cost[self.basis[i]];
            if !cb.is_zero() && !self.t[i][col].is_zero() {
                r -= cb * &self.t[i][col];
            }
        }
        r
    }

    /// Runs Bland's rule over the allowed columns. Returns false if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                !self.basis.contains(&j) && self.reduced_cost(cost, j).is_negative()
            });
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                if self.t[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.t[i][col];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Solves `min c·x  s.t.  A x = b, x >= 0` exactly.
pub fn solve_standard(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let signs: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut t = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = a[i].clone();
        assert_eq!(row.len(), n, "constraint row has wrong width");
        if signs[i] {
            row.iter_mut().for_each(|v| *v = -v.clone());
        }
        row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        t.push(row);
        rhs.push(if signs[i] { -b[i].clone() } else { b[i].clone() });
    }
    let mut tab = Tableau { m, n, t, rhs, basis: (n..n + m).collect() };

    let mut phase1 = vec![Rational::zero(); n + m];
    phase1[n..].iter_mut().for_each(|v| *v = Rational::one());
    tab.optimize(&phase1, n + m);
    let infeas: Rational = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .fold(Rational::zero(), |acc, i| acc + &tab.rhs[i]);
    let unflip = |y: Vec<Rational>| -> Vec<Rational> {
        y.into_iter()
            .zip(&signs)
            .map(|(v, &s)| if s { -v } else { v })
            .collect()
    };
    if infeas.is_positive() {
        let y = tab.duals(&phase1);
        return LpOutcome::Infeasible { farkas: unflip(y) };
    }

    // drive zero-level artificials out of the basis where possible
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, col);
            }
        }
    }

    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    if !tab.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs[i].clone();
        }
    }
    let value = x.iter().zip(c).fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    let duals = unflip(tab.duals(&cost));
    LpOutcome::Optimal { x, value, duals }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Inside,
    Outside,
}

/// Membership proof for a point against the convex hull of a vertex list.
#[derive(Clone, Debug)]
pub struct LpCertificate {
    pub verdict: Verdict,
    /// Inside: vertex index → convex weight.
    pub weights: BTreeMap<usize, Rational>,
    /// Outside: `coeffs · v <= bound` for every vertex, violated by the point.
    pub separator: Option<HalfSpace>,
}

impl LpCertificate {
    /// Checks the certificate directly against the data, without any LP.
    pub fn verify(&self, point: &RationalVector, v: &VRepresentation) -> bool {
        match self.verdict {
            Verdict::Inside => {
                if self.separator.is_some() || self.weights.is_empty() {
                    return false;
                }
                let mut sum = Rational::zero();
                let mut acc = RationalVector::zeros(v.dim());
                for (&i, w) in &self.weights {
                    if w.is_negative() || i >= v.len() {
                        return false;
                    }
                    sum += w;
                    acc = acc.add_scaled(w, &v.vertices()[i]);
                }
                sum.is_one() && &acc == point
            }
            Verdict::Outside => match &self.separator {
                Some(sep) => {
                    sep.dim() == v.dim()
                        && v.vertices().iter().all(|x| sep.satisfied_by(x))
                        && !sep.satisfied_by(point)
                }
                None => false,
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let weights: BTreeMap<String, String> = self
            .weights
            .iter()
            .map(|(i, w)| (i.to_string(), format_rational(w)))
            .collect();
        let separator = self.separator.as_ref().map(|s| {
            serde_json::json!({
                "coeffs": s.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "bound": s.bound().to_string(),
            })
        });
        serde_json::json!({
            "verdict": self.verdict,
            "weights": weights,
            "separator": separator,
        })
    }
}

/// Decides whether `point` lies in the convex hull of `v`, with a certificate.
pub fn lp_membership(point: &RationalVector, v: &VRepresentation) -> Result<LpCertificate, GeometryError> {
    if point.dim() != v.dim() {
        return Err(GeometryError::DimensionMismatch { expected: v.dim(), found: point.dim() });
    }
    if v.is_empty() {
        return Err(GeometryError::Empty);
    }
    let d = v.dim();
    let m = v.len();
    let mut a: Vec<Vec<Rational>> = (0..d)
        .map(|k| v.vertices().iter().map(|x| x[k].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); m]);
    let mut b: Vec<Rational> = point.entries().to_vec();
    b.push(Rational::one());
    let c = vec![Rational::zero(); m];
    match solve_standard(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => {
            let weights = x
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .collect();
            Ok(LpCertificate { verdict: Verdict::Inside, weights, separator: None })
        }
        LpOutcome::Infeasible { farkas } => {
            // farkas = (a, c0): a·v + c0 <= 0 on vertices, a·p + c0 > 0
            let (coeffs, c0) = farkas.split_at(d);
            let sep = HalfSpace::new(coeffs, &(-c0[0].clone()));
            Ok(LpCertificate { verdict: Verdict::Outside, weights: BTreeMap::new(), separator: Some(sep) })
        }
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// `max coeffs·p  s.t.  rows`, in the dual form
/// `min y·bounds  s.t.  Σ y_i row_i = coeffs, y >= 0`.
fn implied_by(rows: &[&HalfSpace], target: &HalfSpace) -> bool {
    let d = target.dim();
    let a: Vec<Vec<Rational>> = (0..d)
        .map(|k| rows.iter().map(|r| Rational::from_integer(r.coeffs()[k].clone())).collect())
        .collect();
    let b = target.coeffs_rational();
    let c: Vec<Rational> = rows.iter().map(|r| r.bound_rational()).collect();
    match solve_standard(&a, &b, &c) {
        LpOutcome::Optimal { value, .. } => value <= target.bound_rational(),
        // dual unbounded: the other rows are infeasible and imply anything
        LpOutcome::Unbounded => true,
        // dual infeasible: the target direction is unbounded over the others
        LpOutcome::Infeasible { .. } => false,
    }
}

/// Drops scalar duplicates and every row implied by the remaining ones.
///
/// Rows are tested one at a time against the rows still kept, so of several
/// mutually implying rows exactly one survives.
pub fn remove_redundant(h: &HRepresentation) -> HRepresentation {
    let mut kept: Vec<HalfSpace> = h.rows().to_vec();
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<&HalfSpace> = kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r).collect();
        if implied_by(&others, &kept[i]) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    HRepresentation::new(h.dim(), kept).expect("rows share the input dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational::{int, rat};

    fn v(rows: &[&[i64]]) -> VRepresentation {
        VRepresentation::new(
            rows[0].len(),
            rows.iter().map(|r| RationalVector::from_ints(r)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn small_lp_optimum() {
        // min -x - y  s.t. x + s1 = 1, y + s2 = 2
        let a = vec![
            vec![int(1), int(0), int(1), int(0)],
            vec![int(0), int(1), int(0), int(1)],
        ];
        let b = vec![int(1), int(2)];
        let c = vec![int(-1), int(-1), int(0), int(0)];
        match solve_standard(&a, &b, &c) {
            LpOutcome::Optimal { x, value, duals } => {
                assert_eq!(value, int(-3));
                assert_eq!(&x[..2], &[int(1), int(2)]);
                assert_eq!(duals, vec![int(-1), int(-1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![int(1), int(1)]];
        match solve_standard(&a, &[int(-1)], &[int(0), int(0)]) {
            LpOutcome::Infeasible { farkas } => {
                assert!((&farkas[0] * int(-1)).is_positive());
                assert!(!farkas[0].is_positive() || farkas[0].is_zero());
            }
            other => panic!("unexpected {other:?}"),
        }
        let a = vec![vec![int(1), int(-1)]];
        assert!(matches!(
            solve_standard(&a, &[int(0)], &[int(-1), int(0)]),
            LpOutcome::Unbounded
        ));
    }

    #[test]
    fn membership_inside_and_outside() {
        let sq = v(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        let p = RationalVector::new(vec![rat(1, 2), rat(-1, 3)]);
        let cert = lp_membership(&p, &sq).unwrap();
        assert_eq!(cert.verdict, Verdict::Inside);
        assert!(cert.verify(&p, &sq));

        let q = RationalVector::new(vec![rat(3, 2), int(0)]);
        let cert = lp_membership(&q, &sq).unwrap();
        assert_eq!(cert.verdict, Verdict::Outside);
        assert!(cert.verify(&q, &sq));
        // forged certificates fail
        let mut forged = cert.clone();
        forged.verdict = Verdict::Inside;
        assert!(!forged.verify(&q, &sq));

        assert!(lp_membership(&RationalVector::from_ints(&[1]), &sq).is_err());
    }

    #[test]
    fn vertex_is_its_own_certificate() {
        let sq = v(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]]);
        let p = RationalVector::from_ints(&[-1, 1]);
        let cert = lp_membership(&p, &sq).unwrap();
        assert_eq!(cert.weights.len(), 1);
        assert_eq!(cert.weights[&2], int(1));
    }

    #[test]
    fn redundancy_removal() {
        let h = HRepresentation::new(
            2,
            vec![
                HalfSpace::from_ints(&[1, 0], 1),
                HalfSpace::from_ints(&[2, 0], 2),
                HalfSpace::from_ints(&[0, 1], 1),
            ],
        )
        .unwrap();
        let r = remove_redundant(&h);
        assert_eq!(r.sorted().rows(), &[HalfSpace::from_ints(&[0, 1], 1), HalfSpace::from_ints(&[1, 0], 1)]);

        let h = HRepresentation::new(
            1,
            vec![HalfSpace::from_ints(&[1], 1), HalfSpace::from_ints(&[1], 2)],
        )
        .unwrap();
        assert_eq!(remove_redundant(&h).rows(), &[HalfSpace::from_ints(&[1], 1)]);

        // the square plus a redundant diagonal cut
        let h = HRepresentation::new(
            2,
            vec![
                HalfSpace::from_ints(&[1, 0], 1),
                HalfSpace::from_ints(&[-1, 0], 1),
                HalfSpace::from_ints(&[0, 1], 1),
                HalfSpace::from_ints(&[0, -1], 1),
                HalfSpace::from_ints(&[1, 1], 3),
            ],
        )
        .unwrap();
        assert_eq!(remove_redundant(&h).len(), 4);
    }
}
