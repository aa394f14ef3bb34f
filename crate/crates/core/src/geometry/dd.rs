//! Double description method.
//!
//! Both conversions reduce to computing the extreme rays of a pointed cone
//! `{y : M y >= 0}` with integer rows `M`:
//!
//! * facets of `conv(V)`: rows are the homogenized vertices `(1, v)`; an
//!   extreme ray `(b, -a)` is the facet `a·p <= b`;
//! * vertices of `{a_i·p <= b_i}`: rows are `(b_i, -a_i)` plus `(1, 0, …, 0)`;
//!   an extreme ray `(t, x)` with `t > 0` is the vertex `x / t`.
//!
//! Rays are kept as primitive integer vectors, first in `i128` with checked
//! arithmetic and, if that overflows, again in `BigInt`. Adjacency of a
//! positive/negative ray pair uses the combinatorial test on zero sets.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::linalg::{independent_subset, inverse, rank};
use super::rational::{primitive_integers, Rational, RationalVector};
use super::repr::{HRepresentation, HalfSpace, VRepresentation};
use super::GeometryError;

trait DdInt:
    Clone + Send + Sync + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul + fmt::Debug
{
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl DdInt for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl DdInt for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Debug)]
struct Overflow;

#[derive(Clone, PartialEq, Eq)]
struct RowSet(Box<[u64]>);

impl RowSet {
    fn empty(bits: usize) -> Self {
        Self(vec![0; bits.div_ceil(64)].into_boxed_slice())
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn intersection(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(other.0.iter()).map(|(a, b)| a & b).collect())
    }
    fn is_superset(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & b == *b)
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            let mut rest = bits;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    w * 64 + b
                })
            })
        })
    }
}

#[derive(Clone)]
struct Ray<T> {
    coords: Vec<T>,
    zeros: RowSet,
    nzeros: u32,
}

fn dot<T: DdInt>(a: &[T], b: &[T]) -> Result<T, Overflow> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let p = x.checked_mul(y).ok_or(Overflow)?;
        acc = acc.checked_add(&p).ok_or(Overflow)?;
    }
    Ok(acc)
}

fn make_primitive<T: DdInt>(v: &mut [T]) {
    let g = v.iter().fold(T::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = x.div_floor(&g);
        }
    }
}

/// Insertion order for the constraints after the initial basis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InsertionOrder {
    /// Plain row index order; on sorted input this is lexicographic order.
    #[default]
    RowIndex,
    /// Increasing number of incidences with the initial simplicial rays,
    /// ties by row index.
    IncidenceEstimate,
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

/// Rows reduced modulo a 61-bit prime, kept only when every minor is below
/// the prime in absolute value (Hadamard bound), so that the rank modulo the
/// prime equals the rational rank.
fn modular_rows(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<u64>>> {
    let dim = rows.first()?.len();
    let max_norm = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY).powi(2)).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    if dim as f64 * max_norm.max(1.0).log2() >= 59.0 {
        return None;
    }
    let p = BigInt::from(PRIME);
    Some(
        rows.iter()
            .map(|r| r.iter().map(|x| x.mod_floor(&p).to_u64().expect("reduced below the prime")).collect())
            .collect(),
    )
}

/// Whether the rows listed in `set` reach rank `target`, modulo the prime.
fn rank_at_least(rows: &[Vec<u64>], set: &RowSet, target: usize) -> bool {
    let mut basis: Vec<Vec<u64>> = Vec::with_capacity(target);
    let mut pivots: Vec<usize> = Vec::with_capacity(target);
    for i in set.iter() {
        let mut v = rows[i].clone();
        for (b, &c) in basis.iter().zip(&pivots) {
            if v[c] != 0 {
                let f = v[c];
                for (x, y) in v.iter_mut().zip(b) {
                    *x = (*x + PRIME - mul_mod(f, *y)) % PRIME;
                }
            }
        }
        if let Some(c) = v.iter().position(|&x| x != 0) {
            let inv = pow_mod(v[c], PRIME - 2);
            v.iter_mut().for_each(|x| *x = mul_mod(*x, inv));
            basis.push(v);
            pivots.push(c);
            if basis.len() >= target {
                return true;
            }
        }
    }
    false
}

struct Cone<T> {
    rows: Vec<Vec<T>>,
    modular: Option<Vec<Vec<u64>>>,
    rays: Vec<Ray<T>>,
    dim: usize,
}

impl<T: DdInt> Cone<T> {
    fn add_row(&mut self, h: usize) -> Result<(), Overflow> {
        let row = &self.rows[h];
        let values: Vec<T> = self
            .rays
            .par_iter()
            .map(|r| dot(row, &r.coords))
            .collect::<Result<_, _>>()?;
        let pos: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in self.rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zeros.insert(h);
                    r.nzeros += 1;
                }
            }
            return Ok(());
        }
        let need = (self.dim as u32).saturating_sub(2);
        let rays = &self.rays;
        let words = rays[0].zeros.0.len();
        let neg_zeros: Vec<u64> = neg.iter().flat_map(|&q| rays[q].zeros.0.iter().copied()).collect();
        let created: Vec<Ray<T>> = pos
            .par_iter()
            .map(|&p| -> Result<Vec<Ray<T>>, Overflow> {
                let mut out = Vec::new();
                let zp = &rays[p].zeros.0;
                for (&q, zq) in neg.iter().zip(neg_zeros.chunks_exact(words)) {
                    let ncommon: u32 = zp.iter().zip(zq).map(|(a, b)| (a & b).count_ones()).sum();
                    if ncommon < need {
                        continue;
                    }
                    let common = rays[p].zeros.intersection(&rays[q].zeros);
                    let adjacent = match &self.modular {
                        Some(m) => rank_at_least(m, &common, self.dim - 2),
                        None => !rays.iter().enumerate().any(|(k, r)| {
                            k != p && k != q && r.nzeros >= ncommon && r.zeros.is_superset(&common)
                        }),
                    };
                    if !adjacent {
                        continue;
                    }
                    // values[p] > 0 > values[q]: combine to vanish on row h
                    let sp = &values[p];
                    let sq = &values[q];
                    let mut coords = Vec::with_capacity(self.dim);
                    for (a, b) in rays[q].coords.iter().zip(&rays[p].coords) {
                        let x = sp.checked_mul(a).ok_or(Overflow)?;
                        let y = sq.checked_mul(b).ok_or(Overflow)?;
                        coords.push(x.checked_sub(&y).ok_or(Overflow)?);
                    }
                    make_primitive(&mut coords);
                    let mut zeros = common;
                    zeros.insert(h);
                    out.push(Ray { coords, zeros, nzeros: ncommon + 1 });
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();

        let mut next = Vec::with_capacity(pos.len() + created.len());
        for (mut r, v) in std::mem::take(&mut self.rays).into_iter().zip(values) {
            if v.is_negative() {
                continue;
            }
            if v.is_zero() {
                r.zeros.insert(h);
                r.nzeros += 1;
            }
            next.push(r);
        }
        next.extend(created);
        self.rays = next;
        Ok(())
    }
}

#[derive(Debug)]
enum ConeError {
    /// The cone has a lineality space; carries the row rank.
    NotPointed(usize),
}

fn run_cone<T: DdInt>(
    rows: &[Vec<BigInt>],
    basis: &[usize],
    initial: &[Vec<BigInt>],
    rest: &[usize],
) -> Result<Vec<Vec<BigInt>>, Overflow> {
    let dim = rows[0].len();
    let m = rows.len();
    let conv = |v: &[BigInt]| -> Result<Vec<T>, Overflow> {
        v.iter().map(|x| T::from_big(x).ok_or(Overflow)).collect()
    };
    let rows_t: Vec<Vec<T>> = rows.iter().map(|r| conv(r)).collect::<Result<_, _>>()?;
    let mut rays = Vec::with_capacity(dim);
    for (k, ray) in initial.iter().enumerate() {
        let mut zeros = RowSet::empty(m);
        for (j, &b) in basis.iter().enumerate() {
            if j != k {
                zeros.insert(b);
            }
        }
        rays.push(Ray { coords: conv(ray)?, zeros, nzeros: (dim - 1) as u32 });
    }
    let mut cone = Cone { rows: rows_t, modular: modular_rows(rows), rays, dim };
    for &h in rest {
        cone.add_row(h)?;
    }
    Ok(cone.rays.into_iter().map(|r| r.coords.iter().map(|x| x.to_big()).collect()).collect())
}

/// Extreme rays of `{y : rows · y >= 0}` as primitive integer vectors.
fn cone_extreme_rays(
    rows: &[Vec<BigInt>],
    order: InsertionOrder,
) -> Result<Vec<Vec<BigInt>>, ConeError> {
    let dim = rows[0].len();
    let rat_rows: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    let all: Vec<usize> = (0..rows.len()).collect();
    let basis = independent_subset(&rat_rows, &all);
    if basis.len() < dim {
        return Err(ConeError::NotPointed(basis.len()));
    }
    let bmat: Vec<Vec<Rational>> = basis.iter().map(|&i| rat_rows[i].clone()).collect();
    let inv = inverse(&bmat).expect("independent rows form an invertible basis");
    // column k of the inverse is tight on every basis row except row k
    let initial: Vec<Vec<BigInt>> = (0..dim)
        .map(|k| {
            let col: Vec<Rational> = (0..dim).map(|i| inv[i][k].clone()).collect();
            primitive_integers(&col)
        })
        .collect();

    let mut rest: Vec<usize> = all.iter().copied().filter(|i| !basis.contains(i)).collect();
    if order == InsertionOrder::IncidenceEstimate {
        let score = |i: usize| -> usize {
            initial
                .iter()
                .filter(|ray| {
                    rows[i]
                        .iter()
                        .zip(ray.iter())
                        .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
                        .is_zero()
                })
                .count()
        };
        let scores: Vec<usize> = (0..rows.len()).map(score).collect();
        rest.sort_by_key(|&i| (scores[i], i));
    }

    match run_cone::<i128>(rows, &basis, &initial, &rest) {
        Ok(r) => Ok(r),
        Err(Overflow) => Ok(run_cone::<BigInt>(rows, &basis, &initial, &rest)
            .expect("arbitrary precision cannot overflow")),
    }
}

/// Facets of the convex hull of `v`, with the default insertion order.
pub fn dd_facets(v: &VRepresentation) -> Result<HRepresentation, GeometryError> {
    dd_facets_with(v, InsertionOrder::default())
}

pub fn dd_facets_with(
    v: &VRepresentation,
    order: InsertionOrder,
) -> Result<HRepresentation, GeometryError> {
    if v.is_empty() {
        return Err(GeometryError::Empty);
    }
    let d = v.dim();
    let rows: Vec<Vec<BigInt>> = v
        .vertices()
        .iter()
        .map(|x| {
            let mut h = vec![Rational::one()];
            h.extend(x.entries().iter().cloned());
            primitive_integers(&h)
        })
        .collect();
    let rays = match cone_extreme_rays(&rows, order) {
        Ok(r) => r,
        Err(ConeError::NotPointed(rank)) => {
            return Err(GeometryError::DegenerateInput { ambient: d, affine_hull: rank - 1 })
        }
    };
    let facets = rays
        .into_iter()
        .map(|y| {
            let bound = Rational::from_integer(y[0].clone());
            let coeffs: Vec<Rational> =
                y[1..].iter().map(|c| Rational::from_integer(-c.clone())).collect();
            HalfSpace::new(&coeffs, &bound)
        })
        .collect();
    HRepresentation::new(d, facets)
}

/// Vertices of the bounded polyhedron `h`, with the default insertion order.
pub fn dd_vertices(h: &HRepresentation) -> Result<VRepresentation, GeometryError> {
    dd_vertices_with(h, InsertionOrder::default())
}

pub fn dd_vertices_with(
    h: &HRepresentation,
    order: InsertionOrder,
) -> Result<VRepresentation, GeometryError> {
    let d = h.dim();
    let mut rows: Vec<Vec<BigInt>> = h
        .rows()
        .iter()
        .map(|r| {
            let mut row = vec![r.bound().clone()];
            row.extend(r.coeffs().iter().map(|c| -c.clone()));
            row
        })
        .collect();
    let mut unit = vec![BigInt::zero(); d + 1];
    unit[0] = BigInt::one();
    rows.push(unit);
    let rays = match cone_extreme_rays(&rows, order) {
        Ok(r) => r,
        Err(ConeError::NotPointed(_)) => {
            // a line in the recession cone; decide between empty and unbounded
            return Err(if feasible(h) { GeometryError::Unbounded } else { GeometryError::Empty });
        }
    };
    let mut vertices = Vec::new();
    let mut recession = false;
    for y in rays {
        if y[0].is_positive() {
            let t = Rational::from_integer(y[0].clone());
            vertices.push(RationalVector::new(
                y[1..].iter().map(|x| Rational::from_integer(x.clone()) / &t).collect(),
            ));
        } else {
            recession = true;
        }
    }
    if vertices.is_empty() {
        return Err(GeometryError::Empty);
    }
    if recession {
        return Err(GeometryError::Unbounded);
    }
    VRepresentation::new(d, vertices)
}

/// Feasibility of `h` via phase one on `x = x⁺ - x⁻` with slacks.
fn feasible(h: &HRepresentation) -> bool {
    use super::lp::{solve_standard, LpOutcome};
    let d = h.dim();
    let m = h.len();
    let a: Vec<Vec<Rational>> = h
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Rational> = r.coeffs_rational();
            row.extend(r.coeffs().iter().map(|c| Rational::from_integer(-c.clone())));
            row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    let b: Vec<Rational> = h.rows().iter().map(|r| r.bound_rational()).collect();
    let c = vec![Rational::zero(); 2 * d + m];
    !matches!(solve_standard(&a, &b, &c), LpOutcome::Infeasible { .. })
}

/// True when `facet` is tight on at least `dim` affinely independent points
/// of `v`, i.e. it defines a facet of a full-dimensional `conv(v)`.
pub fn is_facet_of(facet: &HalfSpace, v: &VRepresentation) -> bool {
    let tight: Vec<Vec<Rational>> = v
        .vertices()
        .iter()
        .filter(|x| facet.tight_on(x))
        .map(|x| {
            let mut h = vec![Rational::one()];
            h.extend(x.entries().iter().cloned());
            h
        })
        .collect();
    tight.len() >= v.dim() && rank(&tight) >= v.dim()
}

/// The rows of `h` that are valid for `conv(v)` and define one of its facets.
pub fn restrict_to_facets(h: &HRepresentation, v: &VRepresentation) -> HRepresentation {
    let rows = h
        .rows()
        .iter()
        .filter(|r| v.vertices().iter().all(|x| r.satisfied_by(x)) && is_facet_of(r, v))
        .cloned()
        .collect();
    HRepresentation::new(h.dim(), rows).expect("rows share the input dimension")
}
