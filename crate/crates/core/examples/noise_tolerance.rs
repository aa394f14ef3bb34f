//! White-noise tolerance of optimal strategies: CHSH on a maximally entangled state, then the
//! see-saw optimum of Genuine LF 1.

use lfbench::quantum::{
    seesaw_maximize, white_noise_tolerance, BipartiteState, DichotomicObservable, Strategy,
};
use lfbench::scenario::{library, Inequality};

fn main() {
    let chsh = Inequality::from_terms(
        "chsh",
        2,
        &[("A1B1", 1), ("A1B2", 1), ("A2B1", 1), ("A2B2", -1)],
        2,
    );
    let obs = |deg: f64| DichotomicObservable::from_angle(deg);
    let singlet = Strategy::new(
        BipartiteState::pure(&BipartiteState::maximally_entangled(2), (2, 2)).unwrap(),
        vec![obs(0.0), obs(90.0)],
        vec![obs(-45.0), obs(45.0)],
    )
    .unwrap();
    let n = white_noise_tolerance(&singlet, &chsh).unwrap();
    println!("chsh: value {:.6}, tolerance {:.4} (1 - 1/sqrt 2 = {:.4})", n.value, n.tolerance, 1.0 - 0.5f64.sqrt());

    let lf1 = library::genuine_lf_1();
    let r = seesaw_maximize(&lf1, 2, 2, 50, 1).unwrap();
    let n = white_noise_tolerance(&r.strategy, &lf1).unwrap();
    println!("{}: value {:.6}, tolerance {:.4}", lf1.label, n.value, n.tolerance);
}
