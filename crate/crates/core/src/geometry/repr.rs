//! V- and H-representations and their line-oriented JSON files.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{parse_rational, primitive_integers, Rational, RationalVector};
use super::GeometryError;

/// `coeffs · p <= bound`, scaled to primitive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    coeffs: Vec<BigInt>,
    bound: BigInt,
}

impl HalfSpace {
    /// Normalizes by positive scaling only; the `<=` orientation carries meaning.
    pub fn new(coeffs: &[Rational], bound: &Rational) -> Self {
        let mut all = coeffs.to_vec();
        all.push(bound.clone());
        let mut ints = primitive_integers(&all);
        let bound = ints.pop().expect("bound present");
        Self { coeffs: ints, bound }
    }

    pub fn from_ints(coeffs: &[i64], bound: i64) -> Self {
        let c: Vec<Rational> = coeffs.iter().map(|&x| Rational::from_integer(x.into())).collect();
        Self::new(&c, &Rational::from_integer(bound.into()))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `bound - coeffs · p`; nonnegative iff `p` satisfies the row.
    pub fn slack(&self, p: &RationalVector) -> Rational {
        Rational::from_integer(self.bound.clone()) - p.dot_int(&self.coeffs)
    }

    pub fn lhs(&self, p: &RationalVector) -> Rational {
        p.dot_int(&self.coeffs)
    }

    pub fn satisfied_by(&self, p: &RationalVector) -> bool {
        !self.slack(p).is_negative()
    }

    pub fn tight_on(&self, p: &RationalVector) -> bool {
        self.slack(p).is_zero()
    }

    pub fn coeffs_rational(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }

    pub fn bound_rational(&self) -> Rational {
        Rational::from_integer(self.bound.clone())
    }

    pub fn lhs_f64(&self, p: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .zip(p)
            .map(|(c, x)| c.to_f64().unwrap_or(f64::NAN) * x)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRepresentation {
    dim: usize,
    rows: Vec<HalfSpace>,
}

impl HRepresentation {
    /// Drops exact duplicates (after normalization) while keeping first-seen order.
    pub fn new(dim: usize, rows: Vec<HalfSpace>) -> Result<Self, GeometryError> {
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(rows.len());
        for r in rows {
            if r.dim() != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, found: r.dim() });
            }
            if seen.insert(r.clone()) {
                kept.push(r);
            }
        }
        Ok(Self { dim, rows: kept })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[HalfSpace] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, p: &RationalVector) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(p))
    }

    /// Rows in lexicographic order of (coefficients, bound).
    pub fn sorted(&self) -> Self {
        let mut rows = self.rows.clone();
        rows.sort();
        Self { dim: self.dim, rows }
    }

    pub fn row_set(&self) -> HashSet<HalfSpace> {
        self.rows.iter().cloned().collect()
    }

    /// The most violated row (largest `lhs - bound`), if any row is violated.
    pub fn most_violated(&self, p: &RationalVector) -> Option<(usize, Rational)> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| (i, -r.slack(p)))
            .filter(|(_, v)| v.is_positive())
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRepresentation {
    dim: usize,
    vertices: Vec<RationalVector>,
}

impl VRepresentation {
    /// Duplicates are merged; first occurrence wins.
    pub fn new(dim: usize, vertices: Vec<RationalVector>) -> Result<Self, GeometryError> {
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(vertices.len());
        for v in vertices {
            if v.dim() != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, found: v.dim() });
            }
            if seen.insert(v.clone()) {
                kept.push(v);
            }
        }
        Ok(Self { dim, vertices: kept })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn sorted(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.sort();
        Self { dim: self.dim, vertices }
    }

    pub fn vertex_set(&self) -> HashSet<RationalVector> {
        self.vertices.iter().cloned().collect()
    }
}

#[derive(Serialize, Deserialize)]
struct VertexLine {
    vertex: RationalVector,
}

#[derive(Serialize, Deserialize)]
struct FacetLine {
    coeffs: Vec<String>,
    bound: String,
}

pub fn write_vertices<W: Write>(mut w: W, v: &VRepresentation) -> std::io::Result<()> {
    for vertex in &v.vertices {
        let line = serde_json::to_string(&VertexLine { vertex: vertex.clone() })?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_facets<W: Write>(mut w: W, h: &HRepresentation) -> std::io::Result<()> {
    for row in &h.rows {
        let line = FacetLine {
            coeffs: row.coeffs.iter().map(|c| c.to_string()).collect(),
            bound: row.bound.to_string(),
        };
        writeln!(w, "{}", serde_json::to_string(&line)?)?;
    }
    Ok(())
}

pub fn read_vertices<R: BufRead>(r: R) -> Result<VRepresentation, GeometryError> {
    let mut vertices = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| GeometryError::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: VertexLine = serde_json::from_str(&line)
            .map_err(|e| GeometryError::Parse(format!("line {}: {e}", n + 1)))?;
        vertices.push(parsed.vertex);
    }
    let dim = vertices.first().map(|v| v.dim()).unwrap_or(0);
    VRepresentation::new(dim, vertices)
}

pub fn read_facets<R: BufRead>(r: R) -> Result<HRepresentation, GeometryError> {
    let mut rows = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| GeometryError::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: FacetLine = serde_json::from_str(&line)
            .map_err(|e| GeometryError::Parse(format!("line {}: {e}", n + 1)))?;
        let coeffs = parsed
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()?;
        let bound = parse_rational(&parsed.bound)?;
        rows.push(HalfSpace::new(&coeffs, &bound));
    }
    let dim = rows.first().map(|r| r.dim()).unwrap_or(0);
    HRepresentation::new(dim, rows)
}
