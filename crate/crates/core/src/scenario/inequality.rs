use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{Behavior, CorrelatorForm, Prob, Scenario, ScenarioError};
use crate::geometry::rational::Rational;
use crate::geometry::repr::HalfSpace;

/// A two-outcome Bell expression in correlator form,
/// `Σ A[x]<A_x> + Σ B[y]<B_y> + Σ AB[x][y]<A_x B_y> <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "InequalityFile", into = "InequalityFile")]
pub struct Inequality {
    pub label: String,
    pub settings: usize,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub ab: Vec<Vec<i64>>,
    pub bound: i64,
}

#[derive(Serialize, Deserialize)]
struct InequalityFile {
    label: String,
    scenario: [usize; 2],
    #[serde(rename = "A")]
    a: Vec<i64>,
    #[serde(rename = "B")]
    b: Vec<i64>,
    #[serde(rename = "AB")]
    ab: Vec<Vec<i64>>,
    bound: i64,
}

impl TryFrom<InequalityFile> for Inequality {
    type Error = String;
    fn try_from(f: InequalityFile) -> Result<Self, String> {
        let [n, o] = f.scenario;
        if o != 2 {
            return Err(format!("inequalities are stored for two outcomes, got {o}"));
        }
        if f.a.len() != n || f.b.len() != n || f.ab.len() != n || f.ab.iter().any(|r| r.len() != n) {
            return Err(format!("coefficient arrays do not match {n} settings"));
        }
        Ok(Self { label: f.label, settings: n, a: f.a, b: f.b, ab: f.ab, bound: f.bound })
    }
}

impl From<Inequality> for InequalityFile {
    fn from(i: Inequality) -> Self {
        Self { label: i.label, scenario: [i.settings, 2], a: i.a, b: i.b, ab: i.ab, bound: i.bound }
    }
}

impl Inequality {
    pub fn zero(label: &str, settings: usize, bound: i64) -> Self {
        Self {
            label: label.to_string(),
            settings,
            a: vec![0; settings],
            b: vec![0; settings],
            ab: vec![vec![0; settings]; settings],
            bound,
        }
    }

    /// Builds an inequality from terms such as `("A1", -1)`, `("B2", 1)`,
    /// `("A2B3", -2)`; settings are 1-based in the term names.
    pub fn from_terms(label: &str, settings: usize, terms: &[(&str, i64)], bound: i64) -> Self {
        let mut ineq = Self::zero(label, settings, bound);
        for &(term, c) in terms {
            let (x, y) = parse_term(term);
            match (x, y) {
                (Some(x), None) => ineq.a[x] += c,
                (None, Some(y)) => ineq.b[y] += c,
                (Some(x), Some(y)) => ineq.ab[x][y] += c,
                (None, None) => panic!("empty term"),
            }
        }
        ineq
    }

    pub fn scenario(&self) -> Scenario {
        Scenario { settings: self.settings, outcomes: 2 }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Coefficients in the fixed order: A marginals, B marginals, joints row-major.
    pub fn coefficient_key(&self) -> Vec<i64> {
        let mut k = self.a.clone();
        k.extend(&self.b);
        for row in &self.ab {
            k.extend(row);
        }
        k
    }

    /// Divides coefficients and bound by their common gcd.
    pub fn normalized(mut self) -> Self {
        let g = self
            .coefficient_key()
            .into_iter()
            .chain(std::iter::once(self.bound))
            .fold(0i64, |acc, v| acc.gcd(&v));
        if g > 1 {
            self.a.iter_mut().for_each(|v| *v /= g);
            self.b.iter_mut().for_each(|v| *v /= g);
            self.ab.iter_mut().flatten().for_each(|v| *v /= g);
            self.bound /= g;
        }
        self
    }

    pub fn evaluate_correlators<T: Prob>(&self, c: &CorrelatorForm<T>) -> T {
        let n = self.settings;
        let mut acc = T::zero();
        for x in 0..n {
            acc = acc + T::from_int(self.a[x]) * c.a[x].clone();
            acc = acc + T::from_int(self.b[x]) * c.b[x].clone();
            for y in 0..n {
                acc = acc + T::from_int(self.ab[x][y]) * c.ab[x][y].clone();
            }
        }
        acc
    }

    /// Left-hand side on `behavior` (the bound is not subtracted). Marginals
    /// are taken from the first slice of the other party.
    pub fn evaluate<T: Prob>(&self, behavior: &Behavior<T>) -> Result<T, ScenarioError> {
        if behavior.scenario() != self.scenario() {
            return Err(ScenarioError::ScenarioMismatch {
                expected: self.scenario(),
                found: behavior.scenario(),
            });
        }
        Ok(self.evaluate_correlators(&behavior.correlators_unchecked()))
    }

    pub fn is_violated<T: Prob>(&self, behavior: &Behavior<T>) -> Result<bool, ScenarioError> {
        Ok(self.evaluate(behavior)? > T::from_int(self.bound))
    }

    /// Affine form over Collins-Gisin coordinates: `LHS = coeffs · p + constant`.
    pub fn collins_gisin_affine(&self) -> (Vec<i64>, i64) {
        let s = self.scenario();
        let n = self.settings;
        let mut g = vec![0i64; s.cg_dim()];
        let mut constant = 0i64;
        for x in 0..n {
            g[s.cg_alice(x, 0)] += 2 * self.a[x];
            g[s.cg_bob(x, 0)] += 2 * self.b[x];
            constant -= self.a[x] + self.b[x];
            for y in 0..n {
                let c = self.ab[x][y];
                g[s.cg_alice(x, 0)] -= 2 * c;
                g[s.cg_bob(y, 0)] -= 2 * c;
                g[s.cg_joint(x, y, 0, 0)] += 4 * c;
                constant += c;
            }
        }
        (g, constant)
    }

    /// The same inequality as a normalized Collins-Gisin half-space.
    pub fn to_collins_gisin(&self) -> HalfSpace {
        let (g, k) = self.collins_gisin_affine();
        let coeffs: Vec<Rational> = g.iter().map(|&c| Rational::from_integer(c.into())).collect();
        HalfSpace::new(&coeffs, &Rational::from_integer((self.bound - k).into()))
    }

    /// Correlator form of a Collins-Gisin half-space of a `(N, 2)` scenario.
    pub fn from_collins_gisin(h: &HalfSpace, settings: usize, label: &str) -> Self {
        let s = Scenario { settings, outcomes: 2 };
        assert_eq!(h.dim(), s.cg_dim(), "half-space does not live in this scenario");
        let c = |i: usize| -> i64 {
            h.coeffs()[i].to_i64().expect("facet coefficient fits in i64")
        };
        let mut ineq = Self::zero(label, settings, 0);
        let mut constant = 0i64;
        for x in 0..settings {
            ineq.a[x] = 2 * c(s.cg_alice(x, 0));
            ineq.b[x] = 2 * c(s.cg_bob(x, 0));
            constant += 2 * c(s.cg_alice(x, 0)) + 2 * c(s.cg_bob(x, 0));
        }
        for x in 0..settings {
            for y in 0..settings {
                let j = c(s.cg_joint(x, y, 0, 0));
                ineq.ab[x][y] = j;
                ineq.a[x] += j;
                ineq.b[y] += j;
                constant += j;
            }
        }
        let bound: BigInt = h.bound() * 4;
        ineq.bound = bound.to_i64().expect("facet bound fits in i64") - constant;
        ineq.normalized()
    }

    /// Human-readable form, e.g. `-<A1> + 2<A2B2> <= 6`.
    pub fn pretty(&self) -> String {
        let mut terms = Vec::new();
        let mut push = |c: i64, name: String| {
            if c != 0 {
                terms.push((c, name));
            }
        };
        for x in 0..self.settings {
            push(self.a[x], format!("<A{}>", x + 1));
        }
        for y in 0..self.settings {
            push(self.b[y], format!("<B{}>", y + 1));
        }
        for x in 0..self.settings {
            for y in 0..self.settings {
                push(self.ab[x][y], format!("<A{}B{}>", x + 1, y + 1));
            }
        }
        let mut out = String::new();
        for (i, (c, name)) in terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                out.push(' ');
            }
            out.push_str(sign);
            if i > 0 && !sign.is_empty() {
                out.push(' ');
            }
            if c.abs() != 1 {
                out.push_str(&c.abs().to_string());
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{out} <= {}", self.bound)
    }
}

fn parse_term(term: &str) -> (Option<usize>, Option<usize>) {
    let mut x = None;
    let mut y = None;
    let mut chars = term.chars().peekable();
    while let Some(party) = chars.next() {
        let mut digits = String::new();
        while let Some(d) = chars.peek().filter(|c| c.is_ascii_digit()) {
            digits.push(*d);
            chars.next();
        }
        let idx: usize = digits.parse::<usize>().expect("setting index") - 1;
        match party {
            'A' => x = Some(idx),
            'B' => y = Some(idx),
            _ => panic!("unknown party in term {term:?}"),
        }
    }
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational::{int, RationalVector};

    fn chsh() -> Inequality {
        Inequality::from_terms("chsh", 2, &[("A1B1", 1), ("A1B2", 1), ("A2B1", 1), ("A2B2", -1)], 2)
    }

    #[test]
    fn collins_gisin_conversion_round_trips() {
        let i = chsh();
        let h = i.to_collins_gisin();
        // CH form: p(11) + p(12) + p(21) - p(22) - pA(1) - pB(1) <= 0
        assert_eq!(h, HalfSpace::from_ints(&[-1, 0, -1, 0, 1, 1, 1, -1], 0));
        assert_eq!(Inequality::from_collins_gisin(&h, 2, "chsh"), i);
    }

    #[test]
    fn affine_form_matches_direct_evaluation() {
        let i = Inequality::from_terms(
            "x",
            3,
            &[("A1", -1), ("B2", 3), ("A2B3", -2), ("A3B1", 1), ("A1B1", 5)],
            4,
        );
        let sc = i.scenario();
        let b = Behavior::<Rational>::deterministic(sc, &[0, 1, 1], &[1, 0, 0])
            .mix(&crate::geometry::rational::rat(1, 3), &Behavior::uniform(sc))
            .unwrap();
        let direct = i.evaluate(&b).unwrap();
        let (g, k) = i.collins_gisin_affine();
        let p = RationalVector::new(b.to_collins_gisin().unwrap());
        let g: Vec<Rational> = g.iter().map(|&c| int(c)).collect();
        assert_eq!(p.dot(&g) + int(k), direct);
    }

    #[test]
    fn uniform_gives_zero() {
        let b = Behavior::<Rational>::uniform(Scenario::new(2, 2).unwrap());
        assert_eq!(chsh().evaluate(&b).unwrap(), int(0));
        let b3 = Behavior::<Rational>::uniform(Scenario::new(3, 2).unwrap());
        assert!(matches!(chsh().evaluate(&b3), Err(ScenarioError::ScenarioMismatch { .. })));
    }

    #[test]
    fn json_format() {
        let text = serde_json::to_string(&chsh()).unwrap();
        assert_eq!(
            text,
            r#"{"label":"chsh","scenario":[2,2],"A":[0,0],"B":[0,0],"AB":[[1,1],[1,-1]],"bound":2}"#
        );
        let back: Inequality = serde_json::from_str(&text).unwrap();
        assert_eq!(back, chsh());
        assert!(serde_json::from_str::<Inequality>(
            r#"{"label":"x","scenario":[2,3],"A":[0,0],"B":[0,0],"AB":[[1,1],[1,-1]],"bound":2}"#
        )
        .is_err());
    }

    #[test]
    fn pretty_printing() {
        assert_eq!(chsh().pretty(), "<A1B1> + <A1B2> + <A2B1> - <A2B2> <= 2");
        let i = Inequality::from_terms("p", 2, &[("A1", -1), ("B1", -2)], 1);
        assert_eq!(i.pretty(), "-<A1> - 2<B1> <= 1");
    }
}
