//! Exact elements of ℚ(√D) and their p-adic norms.

use super::hensel::{is_square_in_qp, unit_sqrt};
use super::norm::{ExtValuation, Radius};
use super::rational::{format_rational, parse_rational, split_unit, square_split, valuation};
use super::truncated::Truncated;
use super::{FieldError, Prime};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// A radicand `D`: a nonzero integer that is not a rational square.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Disc {
    d: BigInt,
}

impl Disc {
    pub fn new(d: BigInt) -> Result<Arc<Disc>, FieldError> {
        let bad = |reason: &str| FieldError::Parse { input: d.to_string(), reason: reason.to_string() };
        if d.is_zero() {
            return Err(bad("radicand is zero"));
        }
        let (_, rest) = square_split(&BigRational::from(d.clone()));
        if rest.is_one() {
            return Err(bad("radicand is a rational square"));
        }
        Ok(Arc::new(Disc { d }))
    }

    pub fn value(&self) -> &BigInt {
        &self.d
    }

    /// `D` is a square in ℚ_p, so ℚ_p(√D) = ℚ_p.
    pub fn splits_at(&self, p: Prime) -> bool {
        is_square_in_qp(&BigRational::from(self.d.clone()), p)
    }

    /// The canonical root of `D` in ℚ_p with `rel` significant digits. Requires [`Disc::splits_at`].
    pub fn root_in_qp(&self, p: Prime, rel: u32) -> Truncated {
        assert!(self.splits_at(p), "{} is not a square in Q_{}", self.d, p);
        let (v, u) = split_unit(&BigRational::from(self.d.clone()), p);
        let r = unit_sqrt(&u, p, rel);
        Truncated::from_residue(p, v / 2, r, rel).expect("unit root")
    }
}

/// `re + im·√D` with exact rational components.
///
/// Rational elements may carry a discriminant so that they combine with
/// quadratic ones; equality ignores it when `im = 0`.
#[derive(Clone, Debug)]
pub struct ExactElement {
    re: BigRational,
    im: BigRational,
    disc: Option<Arc<Disc>>,
}

impl ExactElement {
    pub fn rational(x: BigRational) -> Self {
        ExactElement { re: x, im: BigRational::zero(), disc: None }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn new(re: BigRational, im: BigRational, disc: Arc<Disc>) -> Self {
        ExactElement { re, im, disc: Some(disc) }
    }

    /// `re + im·√x` for any nonzero rational `x`; square factors of `x` are pulled out.
    pub fn with_sqrt(re: BigRational, im: BigRational, x: &BigRational) -> Result<Self, FieldError> {
        let (k, d) = square_split(x);
        if d.is_one() {
            return Ok(Self::rational(re + im * k));
        }
        Ok(Self::new(re, im * k, Disc::new(d)?))
    }

    /// Parses `r`, `r + s*sqrt(D)`, `r - sqrt(D)`, `s*sqrt(D)` with rationals `r`, `s`, `D`.
    pub fn parse(input: &str) -> Result<Self, FieldError> {
        let err = |reason: &str| FieldError::Parse { input: input.to_string(), reason: reason.to_string() };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(at) = s.find("sqrt(") else {
            return Ok(Self::rational(parse_rational(&s)?));
        };
        let inner = s[at + 5..].strip_suffix(')').ok_or_else(|| err("expected `)` at the end"))?;
        let radicand = parse_rational(inner)?;
        if radicand.is_zero() {
            return Err(err("zero radicand"));
        }
        let mut prefix = &s[..at];
        if let Some(stripped) = prefix.strip_suffix('*') {
            prefix = stripped;
        }
        let split = prefix
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-') && !prefix[..i].ends_with('/'))
            .map(|(i, _)| i)
            .next_back();
        let (re_s, coef_s) = match split {
            Some(i) => (&prefix[..i], &prefix[i..]),
            None => ("", prefix),
        };
        let re = if re_s.is_empty() { BigRational::zero() } else { parse_rational(re_s)? };
        let im = match coef_s {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            c => parse_rational(c)?,
        };
        Self::with_sqrt(re, im, &radicand)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn disc(&self) -> Option<&Arc<Disc>> {
        self.disc.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.re)
    }

    /// Same value, tagged with `disc` so it combines with elements of ℚ(√D).
    pub fn in_field(mut self, disc: Option<&Arc<Disc>>) -> Result<Self, FieldError> {
        self.disc = self.join(disc)?;
        Ok(self)
    }

    fn join(&self, other: Option<&Arc<Disc>>) -> Result<Option<Arc<Disc>>, FieldError> {
        match (&self.disc, other) {
            (None, None) => Ok(None),
            (Some(a), None) => Ok(Some(a.clone())),
            (None, Some(b)) => Ok(Some(b.clone())),
            (Some(a), Some(b)) if a.d == b.d => Ok(Some(a.clone())),
            (Some(a), Some(b)) => Err(FieldError::IncompatibleExtensions(a.d.to_string(), b.d.to_string())),
        }
    }

    fn d(disc: &Option<Arc<Disc>>) -> BigRational {
        disc.as_ref().map(|x| BigRational::from(x.d.clone())).unwrap_or_else(BigRational::zero)
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, FieldError> {
        Ok(ExactElement { re: &self.re + &o.re, im: &self.im + &o.im, disc: self.join(o.disc.as_ref())? })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, FieldError> {
        Ok(ExactElement { re: &self.re - &o.re, im: &self.im - &o.im, disc: self.join(o.disc.as_ref())? })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, FieldError> {
        let disc = self.join(o.disc.as_ref())?;
        let d = Self::d(&disc);
        let re = &self.re * &o.re + d * &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        Ok(ExactElement { re, im, disc })
    }

    pub fn conj(&self) -> Self {
        ExactElement { re: self.re.clone(), im: -&self.im, disc: self.disc.clone() }
    }

    /// The field norm `re² - D·im²` down to ℚ.
    pub fn field_norm(&self) -> BigRational {
        &self.re * &self.re - Self::d(&self.disc) * &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.field_norm();
        Ok(ExactElement { re: &self.re / &n, im: -&self.im / &n, disc: self.disc.clone() })
    }

    pub fn try_div(&self, o: &Self) -> Result<Self, FieldError> {
        self.join(o.disc.as_ref())?;
        self.try_mul(&o.inv()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = ExactElement { re: BigRational::one(), im: BigRational::zero(), disc: self.disc.clone() };
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Valuation in ℚ_p(√D), normalised so that `v(p) = 1`.
    pub fn valuation(&self, p: Prime) -> ExtValuation {
        if self.is_zero() {
            return ExtValuation::Infinite;
        }
        if self.im.is_zero() {
            return ExtValuation::from_int(valuation(&self.re, p).expect("nonzero"));
        }
        let disc = self.disc.as_ref().expect("irrational element has a discriminant");
        if !disc.splits_at(p) {
            let v = valuation(&self.field_norm(), p).expect("norm of nonzero element");
            return ExtValuation::Finite(BigRational::new(v.into(), 2.into()));
        }
        // ℚ_p(√D) = ℚ_p: embed through the canonical root, raising precision until
        // the embedded value is visibly nonzero.
        let v_re = valuation(&self.re, p);
        let v_im = valuation(&self.im, p).expect("nonzero");
        let v_root = valuation(&BigRational::from(disc.d.clone()), p).expect("nonzero") / 2;
        let mut rel = 32u32;
        loop {
            let base = v_re.map_or(v_im + v_root, |v| v.min(v_im + v_root));
            let root = disc.root_in_qp(p, rel);
            let prec = |v: i64| (base + rel as i64 - v).max(1) as u32;
            let b = Truncated::from_rational(&self.im, p, prec(v_im));
            let a = match v_re {
                Some(v) => Truncated::from_rational(&self.re, p, prec(v)),
                None => Truncated::exact_zero(p),
            };
            if let Ok(v) = a.add(&b.mul(&root).expect("same prime")).expect("same prime").valuation() {
                return ExtValuation::from_int(v);
            }
            rel = rel.checked_mul(2).expect("element is nonzero, so lifting terminates");
        }
    }

    pub fn norm(&self, p: Prime) -> Radius {
        Radius::from_valuation(&self.valuation(p))
    }

    /// Largest bit length among the numerators and denominators.
    pub fn size_bits(&self) -> u64 {
        [self.re.numer(), self.re.denom(), self.im.numer(), self.im.denom()]
            .iter()
            .map(|n| n.bits())
            .max()
            .unwrap_or(0)
    }
}

impl PartialEq for ExactElement {
    fn eq(&self, o: &Self) -> bool {
        if self.re != o.re || self.im != o.im {
            return false;
        }
        self.im.is_zero() || self.disc.as_ref().map(|d| &d.d) == o.disc.as_ref().map(|d| &d.d)
    }
}

impl Eq for ExactElement {}

impl fmt::Display for ExactElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", format_rational(&self.re));
        }
        let d = &self.disc.as_ref().expect("irrational element has a discriminant").d;
        let coef = |c: &BigRational| {
            if c.is_one() {
                String::new()
            } else {
                format!("{}*", format_rational(c))
            }
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{}sqrt({})", coef(&-&self.im), d)
            } else {
                write!(f, "{}sqrt({})", coef(&self.im), d)
            }
        } else if self.im.is_negative() {
            write!(f, "{} - {}sqrt({})", format_rational(&self.re), coef(&-&self.im), d)
        } else {
            write!(f, "{} + {}sqrt({})", format_rational(&self.re), coef(&self.im), d)
        }
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait for &ExactElement {
            type Output = ExactElement;
            /// Panics when the operands live in different quadratic fields.
            fn $method(self, rhs: &ExactElement) -> ExactElement {
                self.$try(rhs).expect("operands in the same field")
            }
        }
        impl $trait for ExactElement {
            type Output = ExactElement;
            fn $method(self, rhs: ExactElement) -> ExactElement {
                (&self).$try(&rhs).expect("operands in the same field")
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl Neg for &ExactElement {
    type Output = ExactElement;
    fn neg(self) -> ExactElement {
        ExactElement { re: -&self.re, im: -&self.im, disc: self.disc.clone() }
    }
}

impl From<BigRational> for ExactElement {
    fn from(x: BigRational) -> Self {
        Self::rational(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }
    fn e(s: &str) -> ExactElement {
        ExactElement::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3/2", "-7", "1 + sqrt(3)", "1/2 - 3/4*sqrt(-11)", "sqrt(2)", "-sqrt(5)", "-2/3*sqrt(7)"] {
            let x = e(s);
            assert_eq!(e(&x.to_string()), x, "{s}");
        }
        assert_eq!(e("sqrt(12)"), e("2*sqrt(3)"));
        assert_eq!(e("1 + sqrt(4)"), e("3"));
        assert_eq!(e("1/2+sqrt(-1/2)").to_string(), "1/2 + 1/2*sqrt(-2)");
        assert!(ExactElement::parse("1 + sqrt(3").is_err());
        assert!(ExactElement::parse("sqrt(0)").is_err());
    }

    #[test]
    fn valuations_in_extensions() {
        assert_eq!(e("sqrt(3)").valuation(p(3)), ExtValuation::Finite(BigRational::new(1.into(), 2.into())));
        assert_eq!(e("18").valuation(p(3)), ExtValuation::from_int(2));
        assert_eq!(e("0").valuation(p(3)), ExtValuation::Infinite);
        // -11 is a square in ℚ_3: √-11 ≡ ±1 (mod 3), so 1 + √-11 or 1 - √-11 has positive valuation
        let plus = e("1 + sqrt(-11)").valuation(p(3));
        let minus = e("1 - sqrt(-11)").valuation(p(3));
        assert!(plus != minus);
        // the product is 1 + 11 = 12, so the valuations add up to 1
        match (plus, minus) {
            (ExtValuation::Finite(a), ExtValuation::Finite(b)) => assert_eq!(a + b, BigRational::one()),
            _ => panic!(),
        }
    }

    #[test]
    fn split_valuation_needs_deep_lifting() {
        // a + b√D very close to zero in ℚ_5 with D = 6: take a = -(b·r mod 5^40) for b = 1
        let root = Disc::new(6.into()).unwrap().root_in_qp(p(5), 40);
        let digits = root.unit_digits();
        let mut a = BigInt::zero();
        for (i, d) in digits.iter().enumerate() {
            a += BigInt::from(*d) * BigInt::from(5).pow(i as u32);
        }
        let x = ExactElement::new(BigRational::from(-a), BigRational::one(), Disc::new(6.into()).unwrap());
        match x.valuation(p(5)) {
            ExtValuation::Finite(v) => assert!(v >= BigRational::from(BigInt::from(40))),
            _ => panic!(),
        }
    }

    #[test]
    fn field_arithmetic() {
        let x = e("1 + sqrt(3)");
        let y = e("2 - sqrt(3)");
        assert_eq!(&x * &y, e("-1 + sqrt(3)"));
        assert_eq!(x.try_div(&x).unwrap(), e("1"));
        assert!(e("sqrt(2)").try_add(&e("sqrt(3)")).is_err());
        assert_eq!(e("0").inv(), Err(FieldError::DivisionByZero));
    }
}
