//! Equatorial qubit measurements on `ρ_μ` and the violation of fixed
//! inequalities as a function of `μ`.

use std::io::Write;

use serde::Serialize;

use super::{rho_mu, BipartiteState, DichotomicObservable, QuantumError, Strategy};
use crate::scenario::Inequality;

/// Alice measures at angle `φ_x`, Bob at `β - φ_y`; degrees.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementAngles {
    pub phi: Vec<f64>,
    pub beta: f64,
}

impl MeasurementAngles {
    pub fn new(phi: Vec<f64>, beta: f64) -> Self {
        Self { phi, beta }
    }

    /// The settings used in the two-photon experiment.
    pub fn experiment() -> Self {
        Self { phi: vec![168.0, 0.0, 118.0], beta: 175.0 }
    }

    pub fn settings(&self) -> usize {
        self.phi.len()
    }
}

pub fn equatorial_strategy(angles: &MeasurementAngles, state: BipartiteState) -> Result<Strategy, QuantumError> {
    let alice = angles.phi.iter().map(|&p| DichotomicObservable::from_angle(p)).collect();
    let bob = angles.phi.iter().map(|&p| DichotomicObservable::from_angle(angles.beta - p)).collect();
    Strategy::new(state, alice, bob)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu: f64,
    pub label: String,
    pub lhs: f64,
    pub bound: i64,
    pub violated: bool,
}

pub fn mu_sweep(
    angles: &MeasurementAngles,
    mus: &[f64],
    ineqs: &[Inequality],
) -> Result<Vec<SweepRow>, QuantumError> {
    let mut rows = Vec::with_capacity(mus.len() * ineqs.len());
    for &mu in mus {
        let cf = equatorial_strategy(angles, rho_mu(mu)?)?.correlators();
        for ineq in ineqs {
            if ineq.settings != angles.settings() {
                return Err(QuantumError::DimensionMismatch(format!(
                    "{} has {} settings, angles give {}",
                    ineq.label,
                    ineq.settings,
                    angles.settings()
                )));
            }
            let lhs = ineq.evaluate_correlators(&cf);
            rows.push(SweepRow {
                mu,
                label: ineq.label.clone(),
                lhs,
                bound: ineq.bound,
                violated: lhs > ineq.bound as f64,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "mu,label,lhs,bound,violated")?;
    for r in rows {
        writeln!(w, "{},{},{:.12},{},{}", r.mu, r.label, r.lhs, r.bound, r.violated)?;
    }
    Ok(())
}

/// Left-hand side from `<A_x B_y> = -μ cos(φ_x + φ_y - β)` with vanishing
/// marginals.
pub fn closed_form_lhs(angles: &MeasurementAngles, mu: f64, ineq: &Inequality) -> f64 {
    let mut s = 0.0;
    for (x, px) in angles.phi.iter().enumerate() {
        for (y, py) in angles.phi.iter().enumerate() {
            s += ineq.ab[x][y] as f64 * -mu * (px + py - angles.beta).to_radians().cos();
        }
    }
    s
}

/// Smallest `μ` at which the inequality is violated, if any; the left-hand
/// side is linear in `μ`.
pub fn closed_form_threshold(angles: &MeasurementAngles, ineq: &Inequality) -> Option<f64> {
    let full = closed_form_lhs(angles, 1.0, ineq);
    let bound = ineq.bound as f64;
    (full > bound && bound >= 0.0).then(|| bound / full)
}

/// The same threshold found by bisection on the numerically computed
/// behaviors.
pub fn numeric_threshold(angles: &MeasurementAngles, ineq: &Inequality) -> Result<Option<f64>, QuantumError> {
    let lhs = |mu: f64| -> Result<f64, QuantumError> {
        Ok(ineq.evaluate_correlators(&equatorial_strategy(angles, rho_mu(mu)?)?.correlators()))
    };
    let bound = ineq.bound as f64;
    if lhs(1.0)? <= bound {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if lhs(lo)? > bound {
        return Ok(Some(0.0));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if lhs(mid)? > bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
