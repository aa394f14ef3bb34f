//! Alternating maximization of a Bell expression over the state and the
//! observables of each party.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{
    c, hermitian_eigensystem, hermitian_part, observables_json, schmidt_coefficients, BipartiteState, CMatrix,
    CVector, DichotomicObservable, QuantumError, Strategy,
};
use crate::scenario::Inequality;

#[derive(Clone, Debug)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_rounds: usize,
    /// A round improving the value by less than this counts as stalled.
    pub tolerance: f64,
    /// Consecutive stalled rounds before stopping.
    pub patience: usize,
}

impl SeesawOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self { restarts, seed, max_rounds: 2000, tolerance: 1e-9, patience: 3 }
    }
}

pub fn default_restarts(d: usize) -> usize {
    if d <= 2 { 50 } else { 200 }
}

/// One restart: the value after every half-step and the final strategy.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub value: f64,
    pub psi: CVector,
    pub alice: Vec<DichotomicObservable>,
    pub bob: Vec<DichotomicObservable>,
    pub trace: Vec<f64>,
    pub rounds: usize,
    pub converged: bool,
}

impl SeesawRun {
    /// Smallest change between consecutive half-steps.
    pub fn min_step(&self) -> f64 {
        self.trace.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    pub strategy: Strategy,
    pub psi: CVector,
    pub schmidt: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub best_restart: usize,
    pub converged: bool,
    pub seed: u64,
    /// Smallest half-step change over all restarts; negative only through
    /// rounding.
    pub min_step: f64,
}

impl SeesawResult {
    pub fn to_json(&self, ineq: &Inequality) -> Value {
        json!({
            "inequality": ineq.label,
            "bound": ineq.bound,
            "value": self.value,
            "dims": [self.strategy.state.dims().0, self.strategy.state.dims().1],
            "schmidt": self.schmidt,
            "state": self.psi.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
            "alice": observables_json(&self.strategy.alice),
            "bob": observables_json(&self.strategy.bob),
            "iterations": self.iterations,
            "restarts": self.restarts,
            "best_restart": self.best_restart,
            "converged": self.converged,
            "min_step": self.min_step,
            "seed": self.seed,
        })
    }
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        c(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
    });
    hermitian_part(&g)
}

pub fn random_observable(d: usize, rng: &mut ChaCha8Rng) -> DichotomicObservable {
    DichotomicObservable::sign_of(&random_hermitian(d, rng)).expect("random matrix is Hermitian")
}

/// `Σ A[x] A_x ⊗ I + Σ B[y] I ⊗ B_y + Σ AB[x][y] A_x ⊗ B_y`.
pub fn bell_operator(ineq: &Inequality, alice: &[DichotomicObservable], bob: &[DichotomicObservable]) -> CMatrix {
    let da = alice[0].dim();
    let db = bob[0].dim();
    let ia = CMatrix::identity(da, da);
    let ib = CMatrix::identity(db, db);
    let mut w = CMatrix::zeros(da * db, da * db);
    for (x, a) in alice.iter().enumerate() {
        if ineq.a[x] != 0 {
            w += a.matrix().kronecker(&ib).scale(ineq.a[x] as f64);
        }
    }
    for (y, b) in bob.iter().enumerate() {
        if ineq.b[y] != 0 {
            w += ia.kronecker(b.matrix()).scale(ineq.b[y] as f64);
        }
    }
    for (x, a) in alice.iter().enumerate() {
        for (y, b) in bob.iter().enumerate() {
            if ineq.ab[x][y] != 0 {
                w += a.matrix().kronecker(b.matrix()).scale(ineq.ab[x][y] as f64);
            }
        }
    }
    w
}

fn value_of(w: &CMatrix, psi: &CVector) -> f64 {
    (psi.adjoint() * w * psi)[(0, 0)].re
}

/// Coefficient matrix `Ψ` with `|ψ⟩ = Σ Ψ_ij |i⟩|j⟩`.
fn coefficient_matrix(psi: &CVector, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, db, |i, j| psi[i * db + j])
}

fn alice_step(ineq: &Inequality, psi: &CVector, da: usize, db: usize, bob: &[DichotomicObservable]) -> Vec<DichotomicObservable> {
    let m = coefficient_matrix(psi, da, db);
    let mm = &m * m.adjoint();
    (0..ineq.settings)
        .map(|x| {
            let mut weighted = CMatrix::zeros(db, db);
            for (y, b) in bob.iter().enumerate() {
                weighted += b.matrix().scale(ineq.ab[x][y] as f64);
            }
            let r = &m * weighted.transpose() * m.adjoint() + mm.scale(ineq.a[x] as f64);
            DichotomicObservable::sign_of(&hermitian_part(&r)).expect("contraction is Hermitian")
        })
        .collect()
}

fn bob_step(ineq: &Inequality, psi: &CVector, da: usize, db: usize, alice: &[DichotomicObservable]) -> Vec<DichotomicObservable> {
    let m = coefficient_matrix(psi, da, db);
    (0..ineq.settings)
        .map(|y| {
            let mut weighted = CMatrix::identity(da, da).scale(ineq.b[y] as f64);
            for (x, a) in alice.iter().enumerate() {
                weighted += a.matrix().scale(ineq.ab[x][y] as f64);
            }
            let s = (m.adjoint() * weighted * &m).transpose();
            DichotomicObservable::sign_of(&hermitian_part(&s)).expect("contraction is Hermitian")
        })
        .collect()
}

fn top_eigenvector(w: &CMatrix) -> CVector {
    let (_, v) = hermitian_eigensystem(&hermitian_part(w)).expect("Bell operator is Hermitian");
    v.column(v.ncols() - 1).into_owned()
}

/// A single restart from random observables and a maximally entangled state.
pub fn seesaw_run(ineq: &Inequality, da: usize, db: usize, seed: u64, opts: &SeesawOptions) -> SeesawRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alice: Vec<_> = (0..ineq.settings).map(|_| random_observable(da, &mut rng)).collect();
    let mut bob: Vec<_> = (0..ineq.settings).map(|_| random_observable(db, &mut rng)).collect();
    let d = da.min(db);
    let mut psi = CVector::zeros(da * db);
    for i in 0..d {
        psi[i * db + i] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    let mut trace = vec![value_of(&bell_operator(ineq, &alice, &bob), &psi)];
    let mut stalled = 0;
    let mut rounds = 0;
    let mut converged = false;
    while rounds < opts.max_rounds {
        rounds += 1;
        let start = *trace.last().unwrap();
        psi = top_eigenvector(&bell_operator(ineq, &alice, &bob));
        trace.push(value_of(&bell_operator(ineq, &alice, &bob), &psi));
        alice = alice_step(ineq, &psi, da, db, &bob);
        trace.push(value_of(&bell_operator(ineq, &alice, &bob), &psi));
        bob = bob_step(ineq, &psi, da, db, &alice);
        trace.push(value_of(&bell_operator(ineq, &alice, &bob), &psi));
        if trace.last().unwrap() - start < opts.tolerance {
            stalled += 1;
            if stalled >= opts.patience {
                converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
    }
    SeesawRun { value: *trace.last().unwrap(), psi, alice, bob, trace, rounds, converged }
}

pub fn seesaw_maximize(
    ineq: &Inequality,
    da: usize,
    db: usize,
    restarts: usize,
    seed: u64,
) -> Result<SeesawResult, QuantumError> {
    seesaw_maximize_with(ineq, da, db, &SeesawOptions::new(restarts, seed))
}

/// Best of `opts.restarts` runs seeded `seed + k`; ties go to the lowest `k`.
pub fn seesaw_maximize_with(
    ineq: &Inequality,
    da: usize,
    db: usize,
    opts: &SeesawOptions,
) -> Result<SeesawResult, QuantumError> {
    if da < 2 || db < 2 {
        return Err(QuantumError::OutOfRange(format!("local dimensions ({da}, {db})")));
    }
    if opts.restarts == 0 {
        return Err(QuantumError::OutOfRange("restarts = 0".into()));
    }
    let runs: Vec<SeesawRun> = (0..opts.restarts as u64)
        .into_par_iter()
        .map(|k| seesaw_run(ineq, da, db, opts.seed.wrapping_add(k), opts))
        .collect();
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = k;
        }
    }
    let min_step = runs.iter().map(SeesawRun::min_step).fold(f64::INFINITY, f64::min);
    let run = runs.into_iter().nth(best).unwrap();
    let state = BipartiteState::pure(&run.psi, (da, db))?;
    let strategy = Strategy::new(state, run.alice, run.bob)?;
    let schmidt = schmidt_coefficients(&run.psi, (da, db))?;
    Ok(SeesawResult {
        value: ineq.evaluate_correlators(&strategy.correlators()),
        strategy,
        psi: run.psi,
        schmidt,
        iterations: run.rounds,
        restarts: opts.restarts,
        best_restart: best,
        converged: run.converged,
        seed: opts.seed,
        min_step,
    })
}
