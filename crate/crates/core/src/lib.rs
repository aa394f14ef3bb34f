//! Exact correlation polytopes for bipartite Bell and Local-Friendliness
//! scenarios, their symmetry classes, and see-saw search for quantum
//! violations.

pub mod builders;
pub mod geometry;
pub mod quantum;
pub mod scenario;
pub mod symmetry;
pub mod workbench;
