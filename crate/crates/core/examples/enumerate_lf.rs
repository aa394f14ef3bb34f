use std::time::Instant;

use lfbench::builders::{build_polytope, PolytopeKind, DEFAULT_VERTEX_CAP};
use lfbench::scenario::Scenario;

fn main() {
    let t = Instant::now();
    let p = build_polytope(PolytopeKind::Lf, Scenario::new(3, 2).unwrap(), DEFAULT_VERTEX_CAP).unwrap();
    println!("{} vertices, {} facets in {:?}", p.vertices.len(), p.facets.len(), t.elapsed());
}
