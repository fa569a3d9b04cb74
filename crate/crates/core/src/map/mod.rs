//! The map `f(x) = (x² + ax + b)/(cx + d)` with rational parameters.

mod fixed;

pub use fixed::{
    local_radius_bounds, Deviation, DeviationConsts, FixedPointInfo, FixedPoints, LocalGeometry, LocalRadiusBounds, LocalType, RadiusBound,
    StarValues, TwoCycleInfo,
};

use crate::field::rational::{format_rational, parse_rational};
use crate::field::{ExactElement, FieldError, Prime, Radius, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("the orbit hits the pole {pole}")]
    PoleHit { pole: String },
    #[error("point lies in a different quadratic extension than the map's fixed points")]
    NeedsTower,
    #[error("{0}")]
    Field(#[from] FieldError),
    #[error("point is on neither breakpoint sphere of the fixed point")]
    NotOnBreakpointSphere,
    #[error("operation needs case {expected}, map is {found}")]
    WrongCase { expected: CaseTag, found: CaseTag },
    #[error("derivative order must be at least 1")]
    ZeroOrder,
    #[error("fixed point index {0} out of range")]
    NoSuchFixedPoint(usize),
}

/// The four structural cases of the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    /// `c = 1`, `a ≠ d`: one fixed point `b/(d-a)`.
    UniqueFixed,
    /// `c = 1`, `a = d`, `b ≠ 0`: no fixed point, an attracting or indifferent 2-cycle.
    NoFixed,
    /// `c = 1`, `a = d`, `b = 0`: `f` is the identity off the pole.
    Identity,
    /// `c ≠ 1`: the roots of a quadratic, possibly in ℚ(√D).
    TwoFixed,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Validated parameters over a fixed prime.
#[derive(Clone, Debug, PartialEq)]
pub struct MapParams {
    p: Prime,
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
}

/// The parameters embedded in a backend.
#[derive(Clone, Debug)]
pub struct Coefficients<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl MapParams {
    pub fn new(p: Prime, a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Result<Self, MapError> {
        if c.is_zero() {
            return Err(MapError::Invalid("c must be nonzero".into()));
        }
        let m = MapParams { p, a, b, c, d };
        // the identity case is the one degenerate map kept: f(x) = x off x = -a
        if m.residue_numerator().is_zero() && m.case() != CaseTag::Identity {
            return Err(MapError::Invalid(
                "d² - acd + bc² = 0: numerator and denominator share a root, f degenerates".into(),
            ));
        }
        Ok(m)
    }

    /// Parses the prime and four rational strings.
    pub fn parse(p: u64, a: &str, b: &str, c: &str, d: &str) -> Result<Self, MapError> {
        let p = Prime::new(p)?;
        Self::new(p, parse_rational(a)?, parse_rational(b)?, parse_rational(c)?, parse_rational(d)?)
    }

    pub fn p(&self) -> Prime {
        self.p
    }
    pub fn a(&self) -> &BigRational {
        &self.a
    }
    pub fn b(&self) -> &BigRational {
        &self.b
    }
    pub fn c(&self) -> &BigRational {
        &self.c
    }
    pub fn d(&self) -> &BigRational {
        &self.d
    }

    /// `d² - acd + bc²`; nonzero for a valid map.
    pub fn residue_numerator(&self) -> BigRational {
        &self.d * &self.d - &self.a * &self.c * &self.d + &self.b * &self.c * &self.c
    }

    /// The pole `-d/c`.
    pub fn pole(&self) -> BigRational {
        -&self.d / &self.c
    }

    pub fn c_norm(&self) -> Radius {
        ExactElement::rational(self.c.clone()).norm(self.p)
    }

    pub fn case(&self) -> CaseTag {
        if !self.c.is_one() {
            CaseTag::TwoFixed
        } else if self.a != self.d {
            CaseTag::UniqueFixed
        } else if self.b.is_zero() {
            CaseTag::Identity
        } else {
            CaseTag::NoFixed
        }
    }

    pub fn coefficients<S: Scalar>(&self, rel: u32) -> Result<Coefficients<S>, FieldError> {
        let e = |x: &BigRational| S::embed(&ExactElement::rational(x.clone()), self.p, rel);
        Ok(Coefficients { a: e(&self.a)?, b: e(&self.b)?, c: e(&self.c)?, d: e(&self.d)? })
    }

    /// Exact evaluation; `PoleHit` when `cx + d = 0`.
    pub fn eval(&self, x: &ExactElement) -> Result<ExactElement, MapError> {
        let r = |v: &BigRational| ExactElement::rational(v.clone());
        let den = &(&r(&self.c) * x) + &r(&self.d);
        if den.is_zero() {
            return Err(MapError::PoleHit { pole: format_rational(&self.pole()) });
        }
        let num = &(&(x * x) + &(&r(&self.a) * x)) + &r(&self.b);
        Ok(num.try_div(&den)?)
    }

    /// Evaluation in any backend. A denominator that is a tracked zero is a
    /// precision failure, not a pole hit.
    pub fn eval_in<S: Scalar>(&self, k: &Coefficients<S>, x: &S) -> Result<S, MapError> {
        let den = k.c.mul(x)?.add(&k.d)?;
        if den.is_zero()? {
            return Err(MapError::PoleHit { pole: format_rational(&self.pole()) });
        }
        let num = x.mul(x)?.add(&k.a.mul(x)?)?.add(&k.b)?;
        Ok(num.div(&den)?)
    }

    /// `f⁽ⁿ⁾(x)` from the partial fraction form
    /// `f(x) = (1/c³)(c²x + ac² - cd + K/(x + d/c))`, `K = d² - acd + bc²`.
    pub fn derivative(&self, x: &ExactElement, n: u32) -> Result<ExactElement, MapError> {
        if n == 0 {
            return Err(MapError::ZeroOrder);
        }
        let r = |v: BigRational| ExactElement::rational(v);
        let shift = x + &r(&self.d / &self.c);
        if shift.is_zero() {
            return Err(MapError::PoleHit { pole: format_rational(&self.pole()) });
        }
        let k = self.residue_numerator();
        let c3 = &self.c * &self.c * &self.c;
        if n == 1 {
            let tail = r(k).try_div(&(&shift * &shift))?;
            return Ok(&(&r(&self.c * &self.c) - &tail) * &r(BigRational::one() / c3));
        }
        let mut coeff = BigRational::from(factorial(n)) * k / c3;
        if n % 2 == 1 {
            coeff = -coeff;
        }
        Ok(r(coeff).try_div(&shift.pow(n + 1))?)
    }

    /// Multiplier of the unique fixed point in closed form, `(ad + b - a²)/(d² - ad + b)`.
    pub fn unique_fixed_multiplier(&self) -> Result<BigRational, MapError> {
        self.expect_case(CaseTag::UniqueFixed)?;
        let num = &self.a * &self.d + &self.b - &self.a * &self.a;
        let den = &self.d * &self.d - &self.a * &self.d + &self.b;
        Ok(num / den)
    }

    pub(crate) fn expect_case(&self, expected: CaseTag) -> Result<(), MapError> {
        let found = self.case();
        if found == expected {
            Ok(())
        } else {
            Err(MapError::WrongCase { expected, found })
        }
    }

    /// Flat `key = value` text with keys `p, a, b, c, d`; `#` starts a comment.
    pub fn from_key_values(text: &str) -> Result<Self, MapError> {
        let mut fields: [Option<String>; 5] = Default::default();
        const KEYS: [&str; 5] = ["p", "a", "b", "c", "d"];
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| MapError::Invalid(format!("line {}: expected `key = value`", no + 1)))?;
            let k = k.trim();
            let idx = KEYS
                .iter()
                .position(|x| *x == k)
                .ok_or_else(|| MapError::Invalid(format!("line {}: unknown key `{k}`", no + 1)))?;
            fields[idx] = Some(v.trim().to_string());
        }
        let get = |i: usize| {
            fields[i].clone().ok_or_else(|| MapError::Invalid(format!("missing key `{}`", KEYS[i])))
        };
        let p: u64 = get(0)?.parse().map_err(|_| MapError::Invalid("p: not an integer".into()))?;
        Self::parse(p, &get(1)?, &get(2)?, &get(3)?, &get(4)?)
    }
}

impl fmt::Display for MapParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} a={} b={} c={} d={}",
            self.p,
            format_rational(&self.a),
            format_rational(&self.b),
            format_rational(&self.c),
            format_rational(&self.d)
        )
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, a: &str, b: &str, c: &str, d: &str) -> MapParams {
        MapParams::parse(p, a, b, c, d).unwrap()
    }
    fn e(s: &str) -> ExactElement {
        ExactElement::parse(s).unwrap()
    }

    #[test]
    fn validation() {
        assert!(matches!(MapParams::parse(3, "1", "1", "0", "1"), Err(MapError::Invalid(_))));
        // d² - acd + bc² = 1 - 2 + 1 = 0
        assert!(matches!(MapParams::parse(3, "2", "1", "1", "1"), Err(MapError::Invalid(_))));
        assert!(matches!(MapParams::parse(4, "0", "1", "1", "1"), Err(MapError::Field(FieldError::NotPrime(4)))));
    }

    #[test]
    fn cases() {
        assert_eq!(m(3, "0", "2", "1", "1").case(), CaseTag::UniqueFixed);
        assert_eq!(m(3, "0", "-2", "1", "0").case(), CaseTag::NoFixed);
        assert_eq!(m(3, "1", "0", "1", "1").case(), CaseTag::Identity);
        assert_eq!(m(3, "0", "0", "2", "1").case(), CaseTag::TwoFixed);
    }

    #[test]
    fn evaluation() {
        let f = m(3, "0", "2", "1", "1");
        assert_eq!(f.eval(&e("41/4")).unwrap(), e("571/60"));
        assert_eq!(f.eval(&e("0")).unwrap(), e("2"));
        assert!(matches!(f.eval(&e("-1")), Err(MapError::PoleHit { .. })));
        let g = m(3, "0", "-2", "1", "0");
        assert_eq!(g.eval(&e("1")).unwrap(), e("-1"));
        assert_eq!(m(3, "1", "1", "1", "0").eval(&e("2")).unwrap(), e("7/2"));
        let id = m(3, "1", "0", "1", "1");
        assert_eq!(id.eval(&e("5/7")).unwrap(), e("5/7"));
        assert!(matches!(id.eval(&e("-1")), Err(MapError::PoleHit { .. })));
    }

    #[test]
    fn derivatives_match_quotient_rule() {
        let f = m(5, "3", "-2", "2", "7/3");
        for s in ["0", "1/2", "5", "1 + sqrt(2)"] {
            let x = e(s).in_field(e("sqrt(2)").disc()).unwrap();
            // quotient rule: ((2x + a)(cx + d) - c(x² + ax + b)) / (cx + d)²
            let r = |v: &BigRational| ExactElement::rational(v.clone());
            let den = &(&r(f.c()) * &x) + &r(f.d());
            let num = &(&(&(&e("2") * &x) + &r(f.a())) * &den) - &(&r(f.c()) * &(&(&(&x * &x) + &(&r(f.a()) * &x)) + &r(f.b())));
            let expected = num.try_div(&(&den * &den)).unwrap();
            assert_eq!(f.derivative(&x, 1).unwrap(), expected, "x = {s}");
        }
        assert_eq!(f.derivative(&e("0"), 0), Err(MapError::ZeroOrder));
    }

    #[test]
    fn unique_multiplier_agrees_with_derivative() {
        let f = m(3, "0", "2", "1", "1");
        let x0 = e("2");
        assert_eq!(ExactElement::rational(f.unique_fixed_multiplier().unwrap()), f.derivative(&x0, 1).unwrap());
        assert_eq!(f.unique_fixed_multiplier().unwrap(), parse_rational("2/3").unwrap());
    }

    #[test]
    fn key_values() {
        let f = MapParams::from_key_values("# map\np = 3\na = 0\nb = 2\nc = 1\nd = 1\n").unwrap();
        assert_eq!(f, m(3, "0", "2", "1", "1"));
        let err = MapParams::from_key_values("p = 3\nq = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        assert!(MapParams::from_key_values("p = 3\na = 0\n").unwrap_err().to_string().contains("missing key `b`"));
    }
}
