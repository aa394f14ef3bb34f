//! Bipartite Bell scenarios: behaviors, Collins-Gisin and correlator
//! coordinates, no-signalling checks and inequality evaluation.
//!
//! Outcome labels are `0..O` internally. For two outcomes label `0` is the
//! `+1` outcome and label `1` is `-1`.

mod behavior;
mod inequality;
pub mod io;
pub mod library;

pub use behavior::{promote_to_rational, Behavior, CorrelatorForm, NoSignallingReport, Prob};
pub use inequality::Inequality;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for float-mode checks.
pub const FLOAT_TOLERANCE: f64 = 1e-10;

/// Denominator used when promoting float coordinates to exact rationals.
pub const PROMOTION_DENOMINATOR: i64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario ({settings} settings, {outcomes} outcomes): need N >= 1 and O >= 2")]
    InvalidScenario { settings: usize, outcomes: usize },
    #[error("only two-outcome scenarios are supported here, got {0} outcomes")]
    UnsupportedOutcomes(usize),
    #[error("behavior is signalling (max marginal deviation {deviation:e})")]
    NotNoSignalling { deviation: f64 },
    #[error("scenario mismatch: expected {expected:?}, found {found:?}")]
    ScenarioMismatch { expected: Scenario, found: Scenario },
    #[error("table has {found} entries, scenario needs {expected}")]
    WrongSize { expected: usize, found: usize },
    #[error("slice (x={x}, y={y}) does not sum to one")]
    NotNormalized { x: usize, y: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// `N` settings per party, `O` outcomes per setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scenario {
    pub settings: usize,
    pub outcomes: usize,
}

impl Scenario {
    pub fn new(settings: usize, outcomes: usize) -> Result<Self, ScenarioError> {
        if settings < 1 || outcomes < 2 {
            return Err(ScenarioError::InvalidScenario { settings, outcomes });
        }
        Ok(Self { settings, outcomes })
    }

    /// Length of the full table `p(a,b|x,y)`.
    pub fn table_len(&self) -> usize {
        let (n, o) = (self.settings, self.outcomes);
        n * n * o * o
    }

    /// `2N(O-1) + N²(O-1)²`
    pub fn cg_dim(&self) -> usize {
        let k = self.settings * (self.outcomes - 1);
        2 * k + k * k
    }

    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        let (n, o) = (self.settings, self.outcomes);
        ((x * n + y) * o + a) * o + b
    }

    /// Collins-Gisin index of Alice's marginal `p(a|x)`, `a < O-1`.
    pub fn cg_alice(&self, x: usize, a: usize) -> usize {
        x * (self.outcomes - 1) + a
    }

    pub fn cg_bob(&self, y: usize, b: usize) -> usize {
        let k = self.settings * (self.outcomes - 1);
        k + y * (self.outcomes - 1) + b
    }

    pub fn cg_joint(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        let m = self.outcomes - 1;
        let k = self.settings * m;
        2 * k + (x * m + a) * k + (y * m + b)
    }

    fn require_binary(&self) -> Result<(), ScenarioError> {
        if self.outcomes != 2 {
            return Err(ScenarioError::UnsupportedOutcomes(self.outcomes));
        }
        Ok(())
    }

    /// Recovers `(N, 2)` from a Collins-Gisin dimension `2N + N²`.
    pub fn binary_from_cg_dim(dim: usize) -> Option<Self> {
        (1..=16).map(|n| Self { settings: n, outcomes: 2 }).find(|s| s.cg_dim() == dim)
    }
}
