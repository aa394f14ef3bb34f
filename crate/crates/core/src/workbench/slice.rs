//! A two-dimensional affine slice through behavior space,
//! `p(s, t) = p₀ + s (p_ext - p₀) + t (p_Q - p₀)`.
//!
//! Every constraint is affine in `(s, t)`, so membership on a rational grid
//! is decided exactly with integer arithmetic.

use std::io::Write;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::WorkbenchError;
use crate::geometry::linalg::rank;
use crate::geometry::rational::{rat, to_f64, Rational};
use crate::geometry::{HRepresentation, RationalVector};
use crate::scenario::{library, Behavior, Inequality, Scenario};

/// The extreme LF point with both friends' records fixed (Alice's to `-1`,
/// Bob's to `+1`) and a PR-type box on settings 2 and 3.
pub fn extreme_lf_point() -> Behavior<Rational> {
    let s = Scenario { settings: 3, outcomes: 2 };
    let sign = |l: usize| if l == 0 { 1i64 } else { -1 };
    let mut table = vec![Rational::zero(); s.table_len()];
    for x in 0..3 {
        for y in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    let v = match (x, y) {
                        (0, 0) => rat((a == 1 && b == 0) as i64, 1),
                        (0, _) => rat((a == 1) as i64, 2),
                        (_, 0) => rat((b == 0) as i64, 2),
                        _ => {
                            let (px, py) = (x as i64 + 1, y as i64 + 1);
                            let parity = if (px * py - px - py).rem_euclid(2) == 0 { 1 } else { -1 };
                            rat(1 + parity * sign(a) * sign(b), 4)
                        }
                    };
                    table[s.index(x, y, a, b)] = v;
                }
            }
        }
    }
    Behavior::new(s, table).expect("extreme point is normalized")
}

/// The symmetric quantum behavior maximizing Genuine LF 1, from its
/// three-decimal Collins-Gisin table.
pub fn max_quantum_point() -> Behavior<Rational> {
    let s = Scenario { settings: 3, outcomes: 2 };
    let marg = [554, 409, 537];
    let joint = [[197, 21, 150], [21, 311, 40], [150, 40, 109]];
    let mut cg = vec![Rational::zero(); s.cg_dim()];
    for x in 0..3 {
        cg[s.cg_alice(x, 0)] = rat(marg[x], 1000);
        cg[s.cg_bob(x, 0)] = rat(marg[x], 1000);
        for y in 0..3 {
            cg[s.cg_joint(x, y, 0, 0)] = rat(joint[x][y], 1000);
        }
    }
    Behavior::from_collins_gisin(s, &cg).expect("table has the Collins-Gisin size")
}

#[derive(Clone, Debug)]
pub struct SlicePlane {
    pub origin: Behavior<Rational>,
    pub s_end: Behavior<Rational>,
    pub t_end: Behavior<Rational>,
    pub resolution: usize,
    /// Grid range for both coordinates.
    pub range: (Rational, Rational),
    pub horizontal: Inequality,
    /// The vertical axis is the negated left-hand side of this inequality.
    pub vertical: Inequality,
}

impl SlicePlane {
    pub fn new(
        origin: Behavior<Rational>,
        s_end: Behavior<Rational>,
        t_end: Behavior<Rational>,
        resolution: usize,
    ) -> Result<Self, WorkbenchError> {
        let cg = |b: &Behavior<Rational>| b.collins_gisin_unchecked();
        let o = cg(&origin);
        let diffs: Vec<Vec<Rational>> = [cg(&s_end), cg(&t_end)]
            .into_iter()
            .map(|p| p.iter().zip(&o).map(|(a, b)| a - b).collect())
            .collect();
        if rank(&diffs) < 2 {
            return Err(WorkbenchError::Validation("spanning behaviors are affinely dependent".into()));
        }
        if resolution < 2 {
            return Err(WorkbenchError::Validation("slice resolution must be at least 2".into()));
        }
        Ok(Self {
            origin,
            s_end,
            t_end,
            resolution,
            range: (rat(-1, 2), rat(3, 2)),
            horizontal: library::genuine_lf_1(),
            vertical: library::semi_brukner(),
        })
    }

    /// Uniform point, extreme LF point and maximal quantum point.
    pub fn standard(resolution: usize) -> Result<Self, WorkbenchError> {
        let s = Scenario { settings: 3, outcomes: 2 };
        Self::new(Behavior::uniform(s), extreme_lf_point(), max_quantum_point(), resolution)
    }

    pub fn coordinate(&self, k: usize) -> Rational {
        let (lo, hi) = &self.range;
        lo + (hi - lo) * rat(k as i64, self.resolution as i64 - 1)
    }

    pub fn point(&self, s: &Rational, t: &Rational) -> Behavior<Rational> {
        let table = self
            .origin
            .table()
            .iter()
            .zip(self.s_end.table())
            .zip(self.t_end.table())
            .map(|((o, e), q)| o + s * (e - o) + t * (q - o))
            .collect();
        Behavior::new(self.origin.scenario(), table).expect("affine combinations stay normalized")
    }
}

/// `k0 + ks·S + kt·T <= 0` for grid numerators `S`, `T`.
#[derive(Clone, Copy, Debug)]
struct IntRow([i128; 3]);

/// Integer form of `f0 + s (fe - f0) + t (fq - f0) <= bound` with
/// `s = S / q`, `t = T / q`.
fn int_row(f: [&Rational; 3], bound: &Rational, q: i64) -> IntRow {
    let terms = [(f[0] - bound) * Rational::from_integer(q.into()), f[1] - f[0], f[2] - f[0]];
    let d = terms.iter().fold(num_bigint::BigInt::from(1), |acc, r| acc.lcm(r.denom()));
    let k = terms.map(|r| (r * Rational::from_integer(d.clone())).to_integer().to_i128().expect("slice row fits in i128"));
    IntRow(k)
}

impl IntRow {
    fn holds(&self, s: i128, t: i128) -> bool {
        self.0[0] + self.0[1] * s + self.0[2] * t <= 0
    }
}

fn facet_rows(h: &HRepresentation, plane: &SlicePlane, q: i64) -> Vec<IntRow> {
    let pts: Vec<RationalVector> = [&plane.origin, &plane.s_end, &plane.t_end]
        .iter()
        .map(|b| RationalVector::new(b.collins_gisin_unchecked()))
        .collect();
    h.rows()
        .iter()
        .map(|r| {
            let v: Vec<Rational> = pts.iter().map(|p| r.lhs(p)).collect();
            int_row([&v[0], &v[1], &v[2]], &r.bound_rational(), q)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceRow {
    pub s: f64,
    pub t: f64,
    pub valid: bool,
    pub horizontal: f64,
    pub vertical: f64,
    pub in_lhv: bool,
    pub in_lf: bool,
    pub in_ns: bool,
}

/// Membership of every grid point, in row-major `(t, s)` order.
pub fn slice_grid(
    plane: &SlicePlane,
    lhv: &HRepresentation,
    lf: &HRepresentation,
    ns: &HRepresentation,
) -> Vec<SliceRow> {
    let n = plane.resolution;
    // common denominator of the grid coordinates
    let q_rat = plane.coordinate(1) - plane.coordinate(0);
    let q = (0..n)
        .map(|k| plane.coordinate(k).denom().clone())
        .chain(std::iter::once(q_rat.denom().clone()))
        .fold(num_bigint::BigInt::from(1), |acc, d| acc.lcm(&d))
        .to_i64()
        .expect("grid denominator fits in i64");
    let numer = |k: usize| -> i128 {
        (plane.coordinate(k) * Rational::from_integer(q.into())).to_integer().to_i128().unwrap()
    };
    let lhv_rows = facet_rows(lhv, plane, q);
    let lf_rows = facet_rows(lf, plane, q);
    let ns_rows = facet_rows(ns, plane, q);
    let zero = Rational::zero();
    let valid_rows: Vec<IntRow> = (0..plane.origin.table().len())
        .map(|i| {
            let f = [-&plane.origin.table()[i], -&plane.s_end.table()[i], -&plane.t_end.table()[i]];
            int_row([&f[0], &f[1], &f[2]], &zero, q)
        })
        .collect();
    let axis = |ineq: &Inequality, sign: f64| -> [f64; 3] {
        let v: Vec<f64> = [&plane.origin, &plane.s_end, &plane.t_end]
            .iter()
            .map(|b| sign * to_f64(&ineq.evaluate(b).expect("plane lives in the inequality's scenario")))
            .collect();
        [v[0], v[1] - v[0], v[2] - v[0]]
    };
    let hx = axis(&plane.horizontal, 1.0);
    let vy = axis(&plane.vertical, -1.0);
    (0..n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let t = numer(j);
            let tf = to_f64(&plane.coordinate(j));
            let (lhv_rows, lf_rows, ns_rows, valid_rows) = (&lhv_rows, &lf_rows, &ns_rows, &valid_rows);
            (0..n).map(move |i| {
                let s = numer(i);
                let sf = to_f64(&plane.coordinate(i));
                let all = |rows: &[IntRow]| rows.iter().all(|r| r.holds(s, t));
                SliceRow {
                    s: sf,
                    t: tf,
                    valid: all(valid_rows),
                    horizontal: hx[0] + sf * hx[1] + tf * hx[2],
                    vertical: vy[0] + sf * vy[1] + tf * vy[2],
                    in_lhv: all(lhv_rows),
                    in_lf: all(lf_rows),
                    in_ns: all(ns_rows),
                }
            })
        })
        .collect()
}

/// The quantum boundary column is reserved and left empty.
pub fn write_slice_csv<W: Write>(mut w: W, rows: &[SliceRow]) -> std::io::Result<()> {
    writeln!(w, "s,t,valid,genuine_lf_1,neg_semi_brukner,in_lhv,in_lf,in_ns,quantum_boundary")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{:.9},{:.9},{},{},{},",
            r.s, r.t, r.valid, r.horizontal, r.vertical, r.in_lhv, r.in_lf, r.in_ns
        )?;
    }
    Ok(())
}
