//! Exact rational geometry: rationals, V/H-representations, the simplex
//! method, and double-description conversion between representations.

pub mod dd;
pub mod linalg;
pub mod lp;
pub mod rational;
pub mod repr;

pub use dd::{dd_facets, dd_facets_with, dd_vertices, dd_vertices_with, is_facet_of, restrict_to_facets, InsertionOrder};
pub use lp::{lp_membership, remove_redundant, LpCertificate, Verdict};
pub use rational::{Rational, RationalVector};
pub use repr::{HRepresentation, HalfSpace, VRepresentation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("points span an affine hull of dimension {affine_hull} in a {ambient}-dimensional space")]
    DegenerateInput { ambient: usize, affine_hull: usize },
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron is empty")]
    Empty,
    #[error("parse error: {0}")]
    Parse(String),
}
