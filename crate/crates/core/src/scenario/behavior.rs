use std::fmt;

use num_traits::{Num, Signed, ToPrimitive};

use super::{Scenario, ScenarioError, FLOAT_TOLERANCE, PROMOTION_DENOMINATOR};
use crate::geometry::rational::{round_to_denominator, Rational, RationalVector};

/// Scalar of a behavior table: exact rationals or doubles.
pub trait Prob: Clone + PartialOrd + Num + Signed + Send + Sync + fmt::Debug + 'static {
    fn from_int(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact comparison for rationals, `FLOAT_TOLERANCE` for doubles.
    fn approx_eq(&self, other: &Self) -> bool;
    const EXACT: bool;
}

impl Prob for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n.into())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    const EXACT: bool = true;
}

impl Prob for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOLERANCE
    }
    const EXACT: bool = false;
}

/// Conditional probability table `p(a,b|x,y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior<T> {
    scenario: Scenario,
    table: Vec<T>,
}

/// Expectation values `<A_x>`, `<B_y>`, `<A_x B_y>` of a two-outcome behavior.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorForm<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub ab: Vec<Vec<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoSignallingReport {
    pub passed: bool,
    /// Largest absolute difference between marginals that should agree.
    pub deviation: f64,
}

impl<T: Prob> Behavior<T> {
    /// Checks the table size and that every `(x, y)` slice sums to one.
    pub fn new(scenario: Scenario, table: Vec<T>) -> Result<Self, ScenarioError> {
        if table.len() != scenario.table_len() {
            return Err(ScenarioError::WrongSize { expected: scenario.table_len(), found: table.len() });
        }
        let b = Self { scenario, table };
        let n = scenario.settings;
        for x in 0..n {
            for y in 0..n {
                if !b.slice_sum(x, y).approx_eq(&T::one()) {
                    return Err(ScenarioError::NotNormalized { x, y });
                }
            }
        }
        Ok(b)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> &T {
        &self.table[self.scenario.index(x, y, a, b)]
    }

    fn slice_sum(&self, x: usize, y: usize) -> T {
        let o = self.scenario.outcomes;
        let mut s = T::zero();
        for a in 0..o {
            for b in 0..o {
                s = s + self.get(x, y, a, b).clone();
            }
        }
        s
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let o = T::from_int(scenario.outcomes as i64);
        let v = T::one() / (o.clone() * o);
        Self { scenario, table: vec![v; scenario.table_len()] }
    }

    /// Product of local deterministic strategies `x -> alice[x]`, `y -> bob[y]`.
    pub fn deterministic(scenario: Scenario, alice: &[usize], bob: &[usize]) -> Self {
        let n = scenario.settings;
        let mut table = vec![T::zero(); scenario.table_len()];
        for x in 0..n {
            for y in 0..n {
                table[scenario.index(x, y, alice[x], bob[y])] = T::one();
            }
        }
        Self { scenario, table }
    }

    /// `p(a|x)` read from the `y` slice.
    pub fn alice_marginal(&self, x: usize, y: usize, a: usize) -> T {
        (0..self.scenario.outcomes).fold(T::zero(), |acc, b| acc + self.get(x, y, a, b).clone())
    }

    pub fn bob_marginal(&self, x: usize, y: usize, b: usize) -> T {
        (0..self.scenario.outcomes).fold(T::zero(), |acc, a| acc + self.get(x, y, a, b).clone())
    }

    pub fn is_nonnegative(&self) -> bool {
        let tol = if T::EXACT { 0.0 } else { FLOAT_TOLERANCE };
        self.table.iter().all(|p| p.to_f64() >= -tol)
    }

    pub fn check_no_signalling(&self) -> NoSignallingReport {
        let n = self.scenario.settings;
        let o = self.scenario.outcomes;
        let mut worst = T::zero();
        let mut exact_ok = true;
        for x in 0..n {
            for a in 0..o {
                let reference = self.alice_marginal(x, 0, a);
                for y in 1..n {
                    let d = (self.alice_marginal(x, y, a) - reference.clone()).abs();
                    if d > worst {
                        worst = d.clone();
                    }
                    exact_ok &= d.is_zero();
                }
            }
        }
        for y in 0..n {
            for b in 0..o {
                let reference = self.bob_marginal(0, y, b);
                for x in 1..n {
                    let d = (self.bob_marginal(x, y, b) - reference.clone()).abs();
                    if d > worst {
                        worst = d.clone();
                    }
                    exact_ok &= d.is_zero();
                }
            }
        }
        let deviation = worst.to_f64();
        let passed = if T::EXACT { exact_ok } else { deviation <= FLOAT_TOLERANCE };
        NoSignallingReport { passed, deviation }
    }

    fn require_no_signalling(&self) -> Result<(), ScenarioError> {
        let r = self.check_no_signalling();
        if r.passed {
            Ok(())
        } else {
            Err(ScenarioError::NotNoSignalling { deviation: r.deviation })
        }
    }

    /// Collins-Gisin coordinates: `p_A(a|x)`, `p_B(b|y)`, then `p(a,b|x,y)`
    /// for `a, b < O-1`, row-major in `(x, a)` and `(y, b)`.
    pub fn to_collins_gisin(&self) -> Result<Vec<T>, ScenarioError> {
        self.require_no_signalling()?;
        Ok(self.collins_gisin_unchecked())
    }

    /// Collins-Gisin coordinates without the no-signalling check; marginals
    /// are read from the first slice of the other party.
    pub fn collins_gisin_unchecked(&self) -> Vec<T> {
        let s = self.scenario;
        let (n, m) = (s.settings, s.outcomes - 1);
        let mut v = vec![T::zero(); s.cg_dim()];
        for x in 0..n {
            for a in 0..m {
                v[s.cg_alice(x, a)] = self.alice_marginal(x, 0, a);
                v[s.cg_bob(x, a)] = self.bob_marginal(0, x, a);
            }
        }
        for x in 0..n {
            for y in 0..n {
                for a in 0..m {
                    for b in 0..m {
                        v[s.cg_joint(x, y, a, b)] = self.get(x, y, a, b).clone();
                    }
                }
            }
        }
        v
    }

    /// Rebuilds the full table from Collins-Gisin coordinates. The result
    /// is no-signalling and normalized by construction but may have
    /// negative entries if the point lies outside the no-signalling polytope.
    pub fn from_collins_gisin(scenario: Scenario, cg: &[T]) -> Result<Self, ScenarioError> {
        let s = scenario;
        if cg.len() != s.cg_dim() {
            return Err(ScenarioError::WrongSize { expected: s.cg_dim(), found: cg.len() });
        }
        let (n, m) = (s.settings, s.outcomes - 1);
        let mut table = vec![T::zero(); s.table_len()];
        for x in 0..n {
            for y in 0..n {
                let mut last_row = vec![T::zero(); m];
                let mut corner = T::one();
                for a in 0..m {
                    let pa = cg[s.cg_alice(x, a)].clone();
                    let mut rest = pa.clone();
                    for b in 0..m {
                        let j = cg[s.cg_joint(x, y, a, b)].clone();
                        rest = rest - j.clone();
                        last_row[b] = last_row[b].clone() + j.clone();
                        table[s.index(x, y, a, b)] = j;
                    }
                    table[s.index(x, y, a, m)] = rest;
                    corner = corner - pa;
                }
                for b in 0..m {
                    let pb = cg[s.cg_bob(y, b)].clone();
                    table[s.index(x, y, m, b)] = pb.clone() - last_row[b].clone();
                    corner = corner - pb + last_row[b].clone();
                }
                table[s.index(x, y, m, m)] = corner;
            }
        }
        Ok(Self { scenario, table })
    }

    pub fn to_correlators(&self) -> Result<CorrelatorForm<T>, ScenarioError> {
        self.scenario.require_binary()?;
        self.require_no_signalling()?;
        Ok(self.correlators_unchecked())
    }

    /// Correlators with marginals read from the first slice of the other party.
    pub fn correlators_unchecked(&self) -> CorrelatorForm<T> {
        let n = self.scenario.settings;
        let sign = |a: usize| if a == 0 { T::one() } else { -T::one() };
        let mut out = CorrelatorForm {
            a: vec![T::zero(); n],
            b: vec![T::zero(); n],
            ab: vec![vec![T::zero(); n]; n],
        };
        for x in 0..n {
            for y in 0..n {
                for a in 0..2 {
                    for b in 0..2 {
                        let p = self.get(x, y, a, b).clone();
                        let sa = sign(a);
                        let sb = sign(b);
                        out.ab[x][y] = out.ab[x][y].clone() + sa.clone() * sb.clone() * p.clone();
                        if y == 0 {
                            out.a[x] = out.a[x].clone() + sa * p.clone();
                        }
                        if x == 0 {
                            out.b[y] = out.b[y].clone() + sb * p;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_correlators(scenario: Scenario, c: &CorrelatorForm<T>) -> Result<Self, ScenarioError> {
        scenario.require_binary()?;
        let n = scenario.settings;
        let four = T::from_int(4);
        let mut table = vec![T::zero(); scenario.table_len()];
        for x in 0..n {
            for y in 0..n {
                for a in 0..2 {
                    for b in 0..2 {
                        let sa = if a == 0 { T::one() } else { -T::one() };
                        let sb = if b == 0 { T::one() } else { -T::one() };
                        let v = T::one()
                            + sa.clone() * c.a[x].clone()
                            + sb.clone() * c.b[y].clone()
                            + sa * sb * c.ab[x][y].clone();
                        table[scenario.index(x, y, a, b)] = v / four.clone();
                    }
                }
            }
        }
        Ok(Self { scenario, table })
    }

    /// `alpha * self + (1 - alpha) * other`
    pub fn mix(&self, alpha: &T, other: &Self) -> Result<Self, ScenarioError> {
        if self.scenario != other.scenario {
            return Err(ScenarioError::ScenarioMismatch { expected: self.scenario, found: other.scenario });
        }
        let beta = T::one() - alpha.clone();
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(p, q)| alpha.clone() * p.clone() + beta.clone() * q.clone())
            .collect();
        Ok(Self { scenario: self.scenario, table })
    }

    pub fn to_float(&self) -> Behavior<f64> {
        Behavior { scenario: self.scenario, table: self.table.iter().map(|p| p.to_f64()).collect() }
    }
}

impl Behavior<Rational> {
    pub fn cg_vector(&self) -> Result<RationalVector, ScenarioError> {
        Ok(RationalVector::new(self.to_collins_gisin()?))
    }
}

/// Rounds each Collins-Gisin coordinate of a float behavior to a multiple of
/// `1/PROMOTION_DENOMINATOR`. Returns the exact point and the rounding radius
/// (largest coordinate change).
pub fn promote_to_rational(b: &Behavior<f64>) -> Result<(RationalVector, f64), ScenarioError> {
    let cg = b.to_collins_gisin()?;
    let mut radius: f64 = 0.0;
    let point = cg
        .iter()
        .map(|&x| {
            let r = round_to_denominator(x, PROMOTION_DENOMINATOR);
            radius = radius.max((Prob::to_f64(&r) - x).abs());
            r
        })
        .collect();
    Ok((RationalVector::new(point), radius))
}
