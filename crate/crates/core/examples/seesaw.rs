//! See-saw search for the largest quantum value of the two genuine LF facets.

use std::time::Instant;

use lfbench::quantum::{default_restarts, seesaw_maximize, white_noise_tolerance};
use lfbench::scenario::library;

fn main() {
    for (ineq, d) in [(library::genuine_lf_1(), 2), (library::genuine_lf_2(), 3)] {
        let t = Instant::now();
        let r = seesaw_maximize(&ineq, d, d, default_restarts(d), 2024).unwrap();
        let noise = white_noise_tolerance(&r.strategy, &ineq).unwrap();
        println!(
            "{} (d = {d}): value {:.6} > {}, Schmidt {:?}, noise tolerance {:.4} (noise value {:.4}), {:?}",
            ineq.label,
            r.value,
            ineq.bound,
            r.schmidt.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>(),
            noise.tolerance,
            noise.noise_value,
            t.elapsed()
        );
    }
}
