//! Finite-dimensional quantum strategies in double precision.
//!
//! Outcome label `0` is the `+1` eigenspace of a dichotomic observable, so
//! `p(a, b | x, y) = tr(ρ (I ± A_x)/2 ⊗ (I ± B_y)/2)`.

mod seesaw;
mod sweep;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};
use thiserror::Error;

use crate::scenario::{Behavior, CorrelatorForm, Inequality, Scenario, ScenarioError};

pub use seesaw::{
    bell_operator, default_restarts, random_observable, seesaw_maximize, seesaw_maximize_with, seesaw_run,
    SeesawOptions, SeesawResult, SeesawRun,
};
pub use sweep::{
    closed_form_lhs, closed_form_threshold, equatorial_strategy, mu_sweep, numeric_threshold, write_sweep_csv,
    MeasurementAngles, SweepRow,
};

pub type Complex = num_complex::Complex64;
pub type CMatrix = DMatrix<Complex>;
pub type CVector = DVector<Complex>;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = -1e-9;
pub const DICHOTOMIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("matrix is not Hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("not a density operator: {0}")]
    InvalidState(String),
    #[error("observable squares to identity only within {deviation:e}")]
    NotDichotomic { deviation: f64 },
    #[error("vector norm {norm} is not 1")]
    NotNormalized { norm: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0} out of range")]
    OutOfRange(String),
    #[error("strategy reaches {value}, which does not exceed the bound {bound}")]
    NoViolation { value: f64, bound: f64 },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Largest entry of `|M - M†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// as columns.
pub fn hermitian_eigensystem(m: &CMatrix) -> Result<(Vec<f64>, CMatrix), QuantumError> {
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOLERANCE {
        return Err(QuantumError::NotHermitian { deviation });
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vectors))
}

/// `V sign(Λ) V†`, with eigenvalues of magnitude below `1e-12` sent to `+1`.
pub fn matrix_sign(m: &CMatrix) -> Result<CMatrix, QuantumError> {
    let (values, v) = hermitian_eigensystem(m)?;
    let signs = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&l| c(if l < -1e-12 { -1.0 } else { 1.0 }, 0.0)),
    ));
    Ok(hermitian_part(&(&v * signs * v.adjoint())))
}

fn trace(m: &CMatrix) -> Complex {
    m.diagonal().iter().sum()
}

fn flatten(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|r| Value::Array((0..m.ncols()).map(|k| json!([m[(r, k)].re, m[(r, k)].im])).collect()))
        .collect();
    Value::Array(rows)
}

/// Hermitian `±1`-valued observable.
#[derive(Clone, Debug, PartialEq)]
pub struct DichotomicObservable {
    matrix: CMatrix,
}

impl DichotomicObservable {
    pub fn new(matrix: CMatrix) -> Result<Self, QuantumError> {
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(QuantumError::NotHermitian { deviation });
        }
        let d = matrix.nrows();
        let sq = &matrix * &matrix - CMatrix::identity(d, d);
        let deviation = sq.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deviation > DICHOTOMIC_TOLERANCE {
            return Err(QuantumError::NotDichotomic { deviation });
        }
        Ok(Self { matrix })
    }

    /// `2|φ⟩⟨φ| - I` with `|φ⟩ = (|H⟩ + e^{iθ}|V⟩)/√2` and `θ` in degrees.
    pub fn from_angle(theta_deg: f64) -> Self {
        let e = Complex::from_polar(1.0, theta_deg.to_radians());
        let matrix = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), e.conj(), e, c(0.0, 0.0)]);
        Self { matrix }
    }

    /// The sign of a Hermitian matrix.
    pub fn sign_of(m: &CMatrix) -> Result<Self, QuantumError> {
        Ok(Self { matrix: matrix_sign(m)? })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn to_json(&self) -> Value {
        flatten(&self.matrix)
    }
}

/// A density operator on `C^{d_A} ⊗ C^{d_B}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    dims: (usize, usize),
    rho: CMatrix,
}

impl BipartiteState {
    pub fn new(dims: (usize, usize), rho: CMatrix) -> Result<Self, QuantumError> {
        let n = dims.0 * dims.1;
        if rho.nrows() != n || rho.ncols() != n {
            return Err(QuantumError::DimensionMismatch(format!(
                "density matrix is {}x{}, expected {n}x{n}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let tr = trace(&rho);
        if (tr - c(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(QuantumError::InvalidState(format!("trace {tr}")));
        }
        let (values, _) = hermitian_eigensystem(&rho)?;
        if values[0] < PSD_TOLERANCE {
            return Err(QuantumError::InvalidState(format!("eigenvalue {}", values[0])));
        }
        Ok(Self { dims, rho })
    }

    pub fn pure(psi: &CVector, dims: (usize, usize)) -> Result<Self, QuantumError> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > TRACE_TOLERANCE {
            return Err(QuantumError::NotNormalized { norm });
        }
        Self::new(dims, psi * psi.adjoint())
    }

    pub fn maximally_entangled(d: usize) -> CVector {
        let mut psi = CVector::zeros(d * d);
        for i in 0..d {
            psi[i * d + i] = c(1.0 / (d as f64).sqrt(), 0.0);
        }
        psi
    }

    pub fn maximally_mixed(dims: (usize, usize)) -> Self {
        let n = dims.0 * dims.1;
        Self { dims, rho: CMatrix::identity(n, n).scale(1.0 / n as f64) }
    }

    /// `(1 - ε) ρ + ε I / (d_A d_B)`.
    pub fn with_white_noise(&self, eps: f64) -> Result<Self, QuantumError> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(QuantumError::OutOfRange(format!("noise fraction {eps}")));
        }
        let noise = Self::maximally_mixed(self.dims);
        Ok(Self { dims: self.dims, rho: self.rho.scale(1.0 - eps) + noise.rho.scale(eps) })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn expectation(&self, op: &CMatrix) -> f64 {
        trace(&(&self.rho * op)).re
    }
}

/// `μ |Φ⁻⟩⟨Φ⁻| + (1 - μ)/2 (|HV⟩⟨HV| + |VH⟩⟨VH|)` in the basis `HH, HV, VH, VV`.
pub fn rho_mu(mu: f64) -> Result<BipartiteState, QuantumError> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(QuantumError::OutOfRange(format!("mu = {mu}")));
    }
    let mut rho = CMatrix::zeros(4, 4);
    let diag = mu / 2.0 + (1.0 - mu) / 2.0;
    rho[(1, 1)] = c(diag, 0.0);
    rho[(2, 2)] = c(diag, 0.0);
    rho[(1, 2)] = c(-mu / 2.0, 0.0);
    rho[(2, 1)] = c(-mu / 2.0, 0.0);
    BipartiteState::new((2, 2), rho)
}

/// A state with one observable per setting for each party.
#[derive(Clone, Debug)]
pub struct Strategy {
    pub state: BipartiteState,
    pub alice: Vec<DichotomicObservable>,
    pub bob: Vec<DichotomicObservable>,
}

impl Strategy {
    pub fn new(
        state: BipartiteState,
        alice: Vec<DichotomicObservable>,
        bob: Vec<DichotomicObservable>,
    ) -> Result<Self, QuantumError> {
        let (da, db) = state.dims();
        if alice.len() != bob.len() || alice.is_empty() {
            return Err(QuantumError::DimensionMismatch(format!(
                "{} observables for Alice, {} for Bob",
                alice.len(),
                bob.len()
            )));
        }
        if alice.iter().any(|o| o.dim() != da) || bob.iter().any(|o| o.dim() != db) {
            return Err(QuantumError::DimensionMismatch(format!(
                "observables do not act on dimensions ({da}, {db})"
            )));
        }
        Ok(Self { state, alice, bob })
    }

    pub fn settings(&self) -> usize {
        self.alice.len()
    }

    pub fn correlators(&self) -> CorrelatorForm<f64> {
        let (da, db) = self.state.dims();
        let ia = CMatrix::identity(da, da);
        let ib = CMatrix::identity(db, db);
        let a = self.alice.iter().map(|o| self.state.expectation(&o.matrix.kronecker(&ib))).collect();
        let b = self.bob.iter().map(|o| self.state.expectation(&ia.kronecker(&o.matrix))).collect();
        let ab = self
            .alice
            .iter()
            .map(|oa| {
                self.bob
                    .iter()
                    .map(|ob| self.state.expectation(&oa.matrix.kronecker(&ob.matrix)))
                    .collect()
            })
            .collect();
        CorrelatorForm { a, b, ab }
    }

    pub fn with_state(&self, state: BipartiteState) -> Result<Self, QuantumError> {
        Self::new(state, self.alice.clone(), self.bob.clone())
    }
}

/// Born-rule behavior of a strategy.
pub fn behavior_from_strategy(strategy: &Strategy) -> Result<Behavior<f64>, QuantumError> {
    let s = Scenario::new(strategy.settings(), 2)?;
    Ok(Behavior::from_correlators(s, &strategy.correlators())?)
}

/// Singular values of the `d_A × d_B` coefficient matrix of `psi`, descending.
pub fn schmidt_coefficients(psi: &CVector, dims: (usize, usize)) -> Result<Vec<f64>, QuantumError> {
    if psi.len() != dims.0 * dims.1 {
        return Err(QuantumError::DimensionMismatch(format!(
            "vector of length {} for dimensions {dims:?}",
            psi.len()
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > TRACE_TOLERANCE {
        return Err(QuantumError::NotNormalized { norm });
    }
    let m = CMatrix::from_fn(dims.0, dims.1, |i, j| psi[i * dims.1 + j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseTolerance {
    /// Inequality value of the noiseless strategy.
    pub value: f64,
    /// Inequality value with the state replaced by `I / (d_A d_B)`.
    pub noise_value: f64,
    pub tolerance: f64,
}

/// Largest white-noise fraction `ε` for which the strategy still reaches the
/// bound; the value is affine in `ε`, so this is the root of the interpolation
/// between the strategy's value and its value on the maximally mixed state.
pub fn white_noise_tolerance(strategy: &Strategy, ineq: &Inequality) -> Result<NoiseTolerance, QuantumError> {
    let value = ineq.evaluate_correlators(&strategy.correlators());
    let bound = ineq.bound as f64;
    if value <= bound {
        return Err(QuantumError::NoViolation { value, bound });
    }
    let (da, db) = strategy.state.dims();
    let ta: Vec<f64> = strategy.alice.iter().map(|o| o.trace() / da as f64).collect();
    let tb: Vec<f64> = strategy.bob.iter().map(|o| o.trace() / db as f64).collect();
    let noise = CorrelatorForm {
        ab: ta.iter().map(|x| tb.iter().map(|y| x * y).collect()).collect(),
        a: ta,
        b: tb,
    };
    let noise_value = ineq.evaluate_correlators(&noise);
    let tolerance = if noise_value >= bound { 1.0 } else { (value - bound) / (value - noise_value) };
    Ok(NoiseTolerance { value, noise_value, tolerance })
}

pub fn observables_json(obs: &[DichotomicObservable]) -> Value {
    Value::Array(obs.iter().map(|o| o.to_json()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::library;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigensystem_basics() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]));
        let (vals, _) = hermitian_eigensystem(&d).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        let x = DichotomicObservable::from_angle(0.0);
        let (vals, v) = hermitian_eigensystem(x.matrix()).unwrap();
        assert!(close(vals[0], -1.0, 1e-14) && close(vals[1], 1.0, 1e-14));
        let resid = x.matrix() * &v - &v * CMatrix::from_diagonal(&CVector::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0)]));
        assert!(resid.iter().all(|z| z.norm() < 1e-12));
        let not_h = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(hermitian_eigensystem(&not_h), Err(QuantumError::NotHermitian { .. })));
    }

    #[test]
    fn angle_observables() {
        let x = DichotomicObservable::from_angle(0.0);
        assert!(close(x.matrix()[(0, 1)].re, 1.0, 1e-15) && close(x.matrix()[(1, 0)].re, 1.0, 1e-15));
        let y = DichotomicObservable::from_angle(90.0);
        assert!(close(y.matrix()[(0, 1)].im, -1.0, 1e-15) && close(y.matrix()[(1, 0)].im, 1.0, 1e-15));
        for t in [0.0, 17.0, 168.0, 300.0] {
            let o = DichotomicObservable::from_angle(t);
            assert!(close(o.trace(), 0.0, 1e-15));
            assert!(DichotomicObservable::new(o.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn rho_mu_spectrum() {
        for mu in [0.0, 0.3, 0.8, 1.0] {
            let (vals, _) = hermitian_eigensystem(rho_mu(mu).unwrap().rho()).unwrap();
            let mut expect = vec![0.0, 0.0, (1.0 - mu) / 2.0, (1.0 + mu) / 2.0];
            expect.sort_by(|a, b| a.total_cmp(b));
            for (v, e) in vals.iter().zip(expect) {
                assert!(close(*v, e, 1e-12));
            }
        }
        assert!(rho_mu(1.5).is_err());
    }

    #[test]
    fn singlet_correlators_match_closed_form() {
        let phis = [168.0, 0.0, 118.0];
        let beta = 175.0;
        for mu in [1.0, 0.6] {
            let alice: Vec<_> = phis.iter().map(|&p| DichotomicObservable::from_angle(p)).collect();
            let bob: Vec<_> = phis.iter().map(|&p| DichotomicObservable::from_angle(beta - p)).collect();
            let st = Strategy::new(rho_mu(mu).unwrap(), alice, bob).unwrap();
            let cf = st.correlators();
            for x in 0..3 {
                assert!(close(cf.a[x], 0.0, 1e-12) && close(cf.b[x], 0.0, 1e-12));
                for y in 0..3 {
                    let expect = -mu * ((phis[x] + phis[y] - beta) * PI / 180.0).cos();
                    assert!(close(cf.ab[x][y], expect, 1e-12));
                }
            }
            let b = behavior_from_strategy(&st).unwrap();
            assert!(b.check_no_signalling().deviation < 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_gives_uniform_behavior() {
        let st = Strategy::new(
            BipartiteState::maximally_mixed((2, 2)),
            vec![DichotomicObservable::from_angle(10.0), DichotomicObservable::from_angle(80.0)],
            vec![DichotomicObservable::from_angle(33.0), DichotomicObservable::from_angle(-40.0)],
        )
        .unwrap();
        let b = behavior_from_strategy(&st).unwrap();
        assert!(b.table().iter().all(|p| close(*p, 0.25, 1e-14)));
    }

    #[test]
    fn schmidt_examples() {
        let bell = BipartiteState::maximally_entangled(2);
        let s = schmidt_coefficients(&bell, (2, 2)).unwrap();
        assert!(close(s[0], 0.5f64.sqrt(), 1e-12) && close(s[1], 0.5f64.sqrt(), 1e-12));
        let mut prod = CVector::zeros(4);
        prod[0] = c(1.0, 0.0);
        let s = schmidt_coefficients(&prod, (2, 2)).unwrap();
        assert!(close(s[0], 1.0, 1e-12) && close(s[1], 0.0, 1e-12));
        let t = PI / 8.0;
        let mut psi = CVector::zeros(4);
        psi[0] = c(t.cos(), 0.0);
        psi[3] = c(t.sin(), 0.0);
        let s = schmidt_coefficients(&psi, (2, 2)).unwrap();
        assert!(close(s[0], t.cos(), 1e-12) && close(s[1], t.sin(), 1e-12));
        assert!(matches!(
            schmidt_coefficients(&psi.scale(2.0), (2, 2)),
            Err(QuantumError::NotNormalized { .. })
        ));
    }

    #[test]
    fn chsh_noise_tolerance() {
        // Tsirelson strategy for the Brukner form <A1B1> + <A1B2> + <A2B1> - <A2B2>
        let psi = BipartiteState::maximally_entangled(2);
        let st = Strategy::new(
            BipartiteState::pure(&psi, (2, 2)).unwrap(),
            vec![DichotomicObservable::from_angle(0.0), DichotomicObservable::from_angle(90.0), DichotomicObservable::from_angle(0.0)],
            vec![DichotomicObservable::from_angle(-45.0), DichotomicObservable::from_angle(45.0), DichotomicObservable::from_angle(0.0)],
        )
        .unwrap();
        let n = white_noise_tolerance(&st, &library::brukner()).unwrap();
        assert!(close(n.value, 2.0 * 2f64.sqrt(), 1e-12));
        assert!(close(n.tolerance, 1.0 - 1.0 / 2f64.sqrt(), 1e-12));
        // affine in the noise fraction
        let eps = 0.37;
        let noisy = st.with_state(st.state.with_white_noise(eps).unwrap()).unwrap();
        let v = library::brukner().evaluate_correlators(&noisy.correlators());
        assert!(close(v, (1.0 - eps) * n.value + eps * n.noise_value, 1e-12));
        let mixed = st.with_state(BipartiteState::maximally_mixed((2, 2))).unwrap();
        assert!(matches!(
            white_noise_tolerance(&mixed, &library::brukner()),
            Err(QuantumError::NoViolation { .. })
        ));
    }
}
