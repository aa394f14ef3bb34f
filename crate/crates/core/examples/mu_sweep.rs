//! Violation of the sweep inequalities along the family ρ(μ) with the
//! experimental measurement angles.

use lfbench::quantum::{closed_form_threshold, mu_sweep, MeasurementAngles};
use lfbench::scenario::library;

fn main() {
    let angles = MeasurementAngles::experiment();
    let ineqs = library::sweep_inequalities();
    println!("thresholds:");
    for ineq in &ineqs {
        match closed_form_threshold(&angles, ineq) {
            Some(t) => println!("  {:<16} mu > {t:.4}", ineq.label),
            None => println!("  {:<16} never violated", ineq.label),
        }
    }
    let mus = [0.74, 0.80, 0.87, 0.92, 0.99];
    let rows = mu_sweep(&angles, &mus, &ineqs).unwrap();
    for mu in mus {
        let violated: Vec<&str> = rows
            .iter()
            .filter(|r| r.mu == mu && r.violated)
            .map(|r| r.label.as_str())
            .collect();
        println!("mu = {mu:.2}: {violated:?}");
    }
}
