//! Exact rationals and rational vectors.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator after every operation.

use std::fmt;
use std::ops::{Index, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GeometryError;

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"n"`. Decimal points are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, GeometryError> {
    let s = s.trim();
    let bad = || GeometryError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// `"n"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest rational with the given denominator.
pub fn round_to_denominator(x: f64, denom: i64) -> Rational {
    let scaled = (x * denom as f64).round();
    Rational::new(BigInt::from(scaled as i128), BigInt::from(denom))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Lowest common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Scales `values` by the lcm of their denominators and divides by the gcd
/// of the resulting integers. The direction is preserved (positive scaling).
pub fn primitive_integers(values: &[Rational]) -> Vec<BigInt> {
    let l = common_denominator(values);
    let ints: Vec<BigInt> = values
        .iter()
        .map(|r| (r * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|v| v / &g).collect()
    }
}

/// A point of a rational coordinate space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Rational::zero(); dim])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self(v.iter().map(|&x| int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn dot(&self, other: &[Rational]) -> Rational {
        assert_eq!(self.0.len(), other.len(), "dimension mismatch in dot product");
        self.0
            .iter()
            .zip(other)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn dot_int(&self, other: &[BigInt]) -> Rational {
        assert_eq!(self.0.len(), other.len(), "dimension mismatch in dot product");
        self.0.iter().zip(other).fold(Rational::zero(), |acc, (a, b)| {
            acc + a * Rational::from_integer(b.clone())
        })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }

    /// `self + k * dir`
    pub fn add_scaled(&self, k: &Rational, dir: &RationalVector) -> Self {
        Self(
            self.0
                .iter()
                .zip(&dir.0)
                .map(|(a, b)| a + k * b)
                .collect(),
        )
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn max_abs_diff(&self, other: &RationalVector) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl From<Vec<Rational>> for RationalVector {
    fn from(v: Vec<Rational>) -> Self {
        Self(v)
    }
}

impl fmt::Debug for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(x))?;
        }
        write!(f, ")")
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.0.iter().map(format_rational).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map(RationalVector)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("3/-6").unwrap(), rat(-1, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-2, 6)), "-1/3");
    }

    #[test]
    fn primitive_scaling_keeps_direction() {
        let v = vec![rat(1, 2), rat(-3, 4), int(0)];
        let p = primitive_integers(&v);
        assert_eq!(p, vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
        let z = primitive_integers(&[int(0), int(0)]);
        assert!(z.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to_denominator(0.554, 1000), rat(554, 1000));
        assert_eq!(round_to_denominator(-0.25, 4), rat(-1, 4));
    }

    fn canonical(r: &Rational) -> bool {
        r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
    }

    proptest! {
        #[test]
        fn canonical_after_operation_chains(
            seed in prop::collection::vec((-50i64..50, 1i64..40, 0u8..4), 1..30)
        ) {
            let mut acc = rat(1, 1);
            for (n, d, op) in seed {
                let x = rat(n, d);
                acc = match op {
                    0 => &acc + &x,
                    1 => &acc - &x,
                    2 => &acc * &x,
                    _ => if x.is_zero() { acc } else { &acc / &x },
                };
                prop_assert!(canonical(&acc));
            }
        }
    }
}
