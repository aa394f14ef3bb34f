//! A two-dimensional slice through the uniform point, an extreme LF point and
//! the maximal quantum point for Genuine LF 1, drawn as ASCII.
//!
//! `#` LHV, `+` LF only, `.` no-signalling only.

use lfbench::builders::{build_polytope, ns_hrep, PolytopeKind, DEFAULT_VERTEX_CAP};
use lfbench::scenario::Scenario;
use lfbench::workbench::slice::{slice_grid, SlicePlane};

fn main() {
    let s = Scenario::new(3, 2).unwrap();
    let lhv = build_polytope(PolytopeKind::Lhv, s, DEFAULT_VERTEX_CAP).unwrap().facets;
    let lf = build_polytope(PolytopeKind::Lf, s, DEFAULT_VERTEX_CAP).unwrap().facets;
    let plane = SlicePlane::standard(41).unwrap();
    let rows = slice_grid(&plane, &lhv, &lf, &ns_hrep(s));
    for line in rows.chunks(plane.resolution).rev() {
        let text: String = line
            .iter()
            .map(|r| match (r.in_lhv, r.in_lf, r.in_ns) {
                (true, _, _) => '#',
                (_, true, _) => '+',
                (_, _, true) => '.',
                _ => ' ',
            })
            .collect();
        println!("{text}");
    }
}
