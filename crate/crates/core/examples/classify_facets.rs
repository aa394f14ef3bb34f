//! Enumerates the LF(3,2) facets and sorts them into relabeling classes.

use lfbench::builders::{build_polytope, PolytopeKind, DEFAULT_VERTEX_CAP};
use lfbench::scenario::Scenario;
use lfbench::symmetry::classify;

fn main() {
    let s = Scenario::new(3, 2).unwrap();
    let p = build_polytope(PolytopeKind::Lf, s, DEFAULT_VERTEX_CAP).unwrap();
    let classes = classify(&p.facets, s).unwrap();
    let mut total = 0;
    for c in &classes {
        println!("{:<16} {:>4}  {}", c.label, c.multiplicity, c.representative.pretty());
        total += c.multiplicity;
    }
    println!("{:<16} {:>4}", "total", total);
}
