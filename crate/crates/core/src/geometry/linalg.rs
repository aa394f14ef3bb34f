//! Exact Gaussian elimination helpers.

use num_traits::{One, Zero};

use super::rational::{Rational, RationalVector};

/// Row-echelon reduction in place; returns the pivot columns.
fn echelon(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    echelon(&mut m).len()
}

/// Dimension of the affine hull of `points` (-1 encoded as `None` for no points).
pub fn affine_dimension(points: &[RationalVector]) -> Option<usize> {
    let first = points.first()?;
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| (p - first).into_entries())
        .collect();
    Some(if diffs.is_empty() { 0 } else { rank(&diffs) })
}

/// Indices of a maximal linearly independent subset of `rows`, greedily in
/// the given order.
pub fn independent_subset(rows: &[Vec<Rational>], order: &[usize]) -> Vec<usize> {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut chosen = Vec::new();
    for &i in order {
        let mut v = rows[i].clone();
        for (b, &pc) in basis.iter().zip(&pivots) {
            if !v[pc].is_zero() {
                let f = v[pc].clone();
                for j in 0..cols {
                    let t = &f * &b[j];
                    v[j] -= t;
                }
            }
        }
        if let Some(pc) = (0..cols).find(|&j| !v[j].is_zero()) {
            let inv = Rational::one() / &v[pc];
            for x in v.iter_mut() {
                *x = &*x * &inv;
            }
            // keep basis reduced in the new pivot column
            for b in basis.iter_mut() {
                if !b[pc].is_zero() {
                    let f = b[pc].clone();
                    for j in 0..cols {
                        let t = &f * &v[j];
                        b[j] -= t;
                    }
                }
            }
            basis.push(v);
            pivots.push(pc);
            chosen.push(i);
            if chosen.len() == cols {
                break;
            }
        }
    }
    chosen
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}
