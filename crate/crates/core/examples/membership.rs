//! Exact membership of the μ = 0.80 experimental behavior in the LF and LHV
//! polytopes, with verified certificates.

use lfbench::builders::{build_polytope, PolytopeKind, DEFAULT_VERTEX_CAP};
use lfbench::geometry::{lp_membership, Verdict};
use lfbench::quantum::{behavior_from_strategy, equatorial_strategy, rho_mu, MeasurementAngles};
use lfbench::scenario::{library, promote_to_rational, Inequality, Scenario};

fn main() {
    let s = Scenario::new(3, 2).unwrap();
    let strategy = equatorial_strategy(&MeasurementAngles::experiment(), rho_mu(0.80).unwrap()).unwrap();
    let behavior = behavior_from_strategy(&strategy).unwrap();
    let (point, radius) = promote_to_rational(&behavior).unwrap();
    println!("rounding radius {radius:.2e}");
    println!("bell-non-lf: {:.4} against bound 2", library::bell_non_lf().evaluate(&behavior).unwrap());

    for kind in [PolytopeKind::Lhv, PolytopeKind::Lf] {
        let p = build_polytope(kind, s, DEFAULT_VERTEX_CAP).unwrap();
        let cert = lp_membership(&point, &p.vertices).unwrap();
        let verified = cert.verify(&point, &p.vertices);
        match cert.verdict {
            Verdict::Inside => println!(
                "{kind:?}: inside, {} vertices carry weight, certificate verified: {verified}",
                cert.weights.len()
            ),
            Verdict::Outside => {
                let worst = p
                    .facets
                    .rows()
                    .iter()
                    .max_by_key(|f| f.lhs(&point) - f.bound_rational())
                    .unwrap();
                println!("{kind:?}: outside, certificate verified: {verified}");
                println!("  most violated facet: {}", Inequality::from_collins_gisin(worst, 3, "").pretty());
            }
        }
    }
}
