//! Valuations and norms with exact rational exponents.

use super::rational::{format_rational, parse_rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

/// Valuation of an element of ℚ_p(√D): a rational with denominator 1 or 2, or `+∞` for zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtValuation {
    Finite(BigRational),
    Infinite,
}

impl ExtValuation {
    pub fn from_int(v: i64) -> Self {
        ExtValuation::Finite(BigRational::from(BigInt::from(v)))
    }
}

impl fmt::Display for ExtValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValuation::Finite(v) => write!(f, "{}", format_rational(v)),
            ExtValuation::Infinite => write!(f, "inf"),
        }
    }
}

/// A p-adic absolute value `p^e`, stored by its exponent `e = -v`.
///
/// Ordering is the real ordering of the values: `Zero < p^e < Infinity`.
/// Serialized as `"zero"`, `"inf"` or `{"exp": "e"}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Radius {
    Zero,
    Finite(BigRational),
    Infinity,
}

impl Radius {
    pub fn one() -> Self {
        Radius::Finite(BigRational::zero())
    }

    pub fn exp(e: i64) -> Self {
        Radius::Finite(BigRational::from(BigInt::from(e)))
    }

    pub fn exp_ratio(n: i64, d: i64) -> Self {
        Radius::Finite(BigRational::new(n.into(), d.into()))
    }

    pub fn from_valuation(v: &ExtValuation) -> Self {
        match v {
            ExtValuation::Finite(v) => Radius::Finite(-v),
            ExtValuation::Infinite => Radius::Zero,
        }
    }

    pub fn exponent(&self) -> Option<&BigRational> {
        match self {
            Radius::Finite(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Radius::Zero)
    }

    pub fn is_finite_nonzero(&self) -> bool {
        matches!(self, Radius::Finite(_))
    }

    /// Floating point value `p^e`, for display only.
    pub fn to_f64(&self, p: u64) -> f64 {
        match self {
            Radius::Zero => 0.0,
            Radius::Infinity => f64::INFINITY,
            Radius::Finite(e) => {
                let e = e.numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
                    / e.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
                (p as f64).powf(e)
            }
        }
    }

    pub fn square(&self) -> Radius {
        self * self
    }

    /// `self^k` for a positive integer `k`.
    pub fn pow(&self, k: u32) -> Radius {
        assert!(k > 0);
        match self {
            Radius::Finite(e) => Radius::Finite(e * BigRational::from(BigInt::from(k))),
            other => other.clone(),
        }
    }

    pub fn parse(s: &str) -> Option<Radius> {
        match s.trim() {
            "zero" | "0" => Some(Radius::Zero),
            "inf" => Some(Radius::Infinity),
            t => parse_rational(t).ok().map(Radius::Finite),
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Zero => write!(f, "0"),
            Radius::Infinity => write!(f, "inf"),
            Radius::Finite(e) => write!(f, "p^{}", format_rational(e)),
        }
    }
}

impl Ord for Radius {
    fn cmp(&self, other: &Self) -> Ordering {
        use Radius::*;
        match (self, other) {
            (Zero, Zero) | (Infinity, Infinity) => Ordering::Equal,
            (Zero, _) | (_, Infinity) => Ordering::Less,
            (_, Zero) | (Infinity, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Radius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for &Radius {
    type Output = Radius;
    fn mul(self, rhs: &Radius) -> Radius {
        use Radius::*;
        match (self, rhs) {
            (Zero, Infinity) | (Infinity, Zero) => panic!("0 · inf is undefined"),
            (Zero, _) | (_, Zero) => Zero,
            (Infinity, _) | (_, Infinity) => Infinity,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl Div for &Radius {
    type Output = Radius;
    fn div(self, rhs: &Radius) -> Radius {
        use Radius::*;
        match (self, rhs) {
            (_, Zero) => panic!("division by the zero radius"),
            (Infinity, Infinity) => panic!("inf / inf is undefined"),
            (Zero, _) => Zero,
            (_, Infinity) => Zero,
            (Infinity, _) => Infinity,
            (Finite(a), Finite(b)) => Finite(a - b),
        }
    }
}

impl Mul for Radius {
    type Output = Radius;
    fn mul(self, rhs: Radius) -> Radius {
        &self * &rhs
    }
}

impl Div for Radius {
    type Output = Radius;
    fn div(self, rhs: Radius) -> Radius {
        &self / &rhs
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Radius::Zero => s.serialize_str("zero"),
            Radius::Infinity => s.serialize_str("inf"),
            Radius::Finite(e) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("exp", &format_rational(e))?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Exp { exp: String },
        }
        match Raw::deserialize(d)? {
            Raw::Tag(t) if t == "zero" => Ok(Radius::Zero),
            Raw::Tag(t) if t == "inf" => Ok(Radius::Infinity),
            Raw::Tag(t) => Err(de::Error::custom(format!("unknown radius tag `{t}`"))),
            Raw::Exp { exp } => parse_rational(&exp)
                .map(Radius::Finite)
                .map_err(|e| de::Error::custom(e.to_string())),
        }
    }
}

impl Radius {
    /// `self <= p^t`.
    pub fn exp_at_most(&self, t: &BigRational) -> bool {
        match self {
            Radius::Zero => true,
            Radius::Infinity => false,
            Radius::Finite(e) => e <= t,
        }
    }

    /// `self >= p^t`.
    pub fn exp_at_least(&self, t: &BigRational) -> bool {
        match self {
            Radius::Zero => false,
            Radius::Infinity => true,
            Radius::Finite(e) => e >= t,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_arithmetic() {
        assert!(Radius::Zero < Radius::exp(-100));
        assert!(Radius::exp(3) < Radius::Infinity);
        assert!(Radius::exp_ratio(1, 2) < Radius::exp(1));
        assert_eq!(&Radius::exp(2) * &Radius::exp(-3), Radius::exp(-1));
        assert_eq!(&Radius::exp(2) / &Radius::exp(-3), Radius::exp(5));
        assert_eq!(&Radius::Zero * &Radius::exp(4), Radius::Zero);
        assert_eq!(Radius::exp_ratio(1, 2).square(), Radius::exp(1));
    }

    #[test]
    fn serde_round_trip() {
        for r in [Radius::Zero, Radius::Infinity, Radius::exp(-3), Radius::exp_ratio(-5, 2)] {
            let s = serde_json::to_string(&r).unwrap();
            let back: Radius = serde_json::from_str(&s).unwrap();
            assert_eq!(back, r);
        }
        assert_eq!(serde_json::to_string(&Radius::exp_ratio(1, 2)).unwrap(), r#"{"exp":"1/2"}"#);
    }

    #[test]
    fn from_valuation() {
        assert_eq!(Radius::from_valuation(&ExtValuation::from_int(2)), Radius::exp(-2));
        assert_eq!(Radius::from_valuation(&ExtValuation::Infinite), Radius::Zero);
    }
}
