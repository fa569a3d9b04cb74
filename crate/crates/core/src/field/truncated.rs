//! Truncated p-adic numbers with tracked precision.
//!
//! A nonzero value is `p^val · u (mod p^(val+rel))` with `u` a unit known to
//! `rel` digits. A value whose known digits are all zero is a tracked zero
//! `O(p^abs)`. Only the exact zero has infinite precision.
//!
//! Precision rules: products and quotients keep the smaller relative
//! precision; sums keep the smaller absolute precision and renormalise, so
//! cancellation visibly costs digits.

use super::exact::{Disc, ExactElement};
use super::norm::Radius;
use super::rational::{base_p_digits, mod_inverse, pow_p, residue, split_unit, uint_split};
use super::{FieldError, Prime};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    ExactZero,
    Zero { abs: i64 },
    Unit { val: i64, unit: BigUint, rel: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncated {
    p: Prime,
    repr: Repr,
}

impl Truncated {
    pub fn exact_zero(p: Prime) -> Self {
        Truncated { p, repr: Repr::ExactZero }
    }

    /// `O(p^abs)`.
    pub fn tracked_zero(p: Prime, abs: i64) -> Self {
        Truncated { p, repr: Repr::Zero { abs } }
    }

    /// Rounds a rational to `rel` significant digits. Zero stays exact.
    pub fn from_rational(x: &BigRational, p: Prime, rel: u32) -> Self {
        assert!(rel > 0, "relative precision must be positive");
        if x.is_zero() {
            return Self::exact_zero(p);
        }
        let (val, u) = split_unit(x, p);
        let unit = residue(&u, p, rel);
        Truncated { p, repr: Repr::Unit { val, unit, rel } }
    }

    pub fn from_int(n: i64, p: Prime, rel: u32) -> Self {
        Self::from_rational(&BigRational::from(BigInt::from(n)), p, rel)
    }

    /// `p^val · w (mod p^(val+width))` for an arbitrary residue `w`.
    pub fn from_residue(p: Prime, val: i64, w: BigUint, width: u32) -> Result<Self, FieldError> {
        let w = w % pow_p(p, width);
        if w.is_zero() {
            let abs = val.checked_add(width as i64).ok_or(FieldError::Overflow)?;
            return Ok(Self::tracked_zero(p, abs));
        }
        let (k, unit) = uint_split(&w, p);
        let val = val.checked_add(k as i64).ok_or(FieldError::Overflow)?;
        Ok(Truncated { p, repr: Repr::Unit { val, unit, rel: width - k as u32 } })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    /// Known to be nonzero.
    pub fn is_nonzero(&self) -> bool {
        matches!(self.repr, Repr::Unit { .. })
    }

    /// Absolute precision: the value is known modulo `p^abs`. `None` for the exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::Zero { abs } => Some(*abs),
            Repr::Unit { val, rel, .. } => Some(val + *rel as i64),
        }
    }

    /// Number of significant digits; 0 for zeros.
    pub fn rel_precision(&self) -> u32 {
        match &self.repr {
            Repr::Unit { rel, .. } => *rel,
            _ => 0,
        }
    }

    pub fn valuation(&self) -> Result<i64, FieldError> {
        match &self.repr {
            Repr::Unit { val, .. } => Ok(*val),
            Repr::Zero { .. } => Err(FieldError::PrecisionExhausted),
            Repr::ExactZero => Err(FieldError::DivisionByZero),
        }
    }

    pub fn norm(&self) -> Result<Radius, FieldError> {
        match &self.repr {
            Repr::ExactZero => Ok(Radius::Zero),
            Repr::Zero { .. } => Err(FieldError::PrecisionExhausted),
            Repr::Unit { val, .. } => Ok(Radius::exp(-val)),
        }
    }

    /// Known unit digits, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Unit { unit, rel, .. } => base_p_digits(unit, self.p, *rel as usize),
            _ => Vec::new(),
        }
    }

    /// Whether the exact rational `x` is consistent with the known digits.
    pub fn contains(&self, x: &BigRational) -> bool {
        let Some(abs) = self.abs_precision() else {
            return x.is_zero();
        };
        if x.is_zero() {
            return !self.is_nonzero();
        }
        let (v, _) = split_unit(x, self.p);
        let width = (abs - v).max(1) as u32;
        let exact = Truncated::from_rational(x, self.p, width);
        match exact.sub(self) {
            Ok(d) => !d.is_nonzero() || d.valuation().map(|w| w >= abs).unwrap_or(true),
            Err(_) => false,
        }
    }

    fn same_prime(&self, o: &Self) -> Result<(), FieldError> {
        if self.p == o.p {
            Ok(())
        } else {
            Err(FieldError::PrimeMismatch(self.p.get(), o.p.get()))
        }
    }

    pub fn neg(&self) -> Self {
        let repr = match &self.repr {
            Repr::Unit { val, unit, rel } => {
                Repr::Unit { val: *val, unit: pow_p(self.p, *rel) - unit, rel: *rel }
            }
            r => r.clone(),
        };
        Truncated { p: self.p, repr }
    }

    pub fn add(&self, o: &Self) -> Result<Self, FieldError> {
        self.same_prime(o)?;
        let (a, b) = match (self.abs_precision(), o.abs_precision()) {
            (None, _) => return Ok(o.clone()),
            (_, None) => return Ok(self.clone()),
            (Some(a), Some(b)) => (a, b),
        };
        let abs = a.min(b);
        let terms: Vec<(i64, &BigUint)> = [&self.repr, &o.repr]
            .into_iter()
            .filter_map(|r| match r {
                Repr::Unit { val, unit, .. } if *val < abs => Some((*val, unit)),
                _ => None,
            })
            .collect();
        let Some(vmin) = terms.iter().map(|t| t.0).min() else {
            return Ok(Self::tracked_zero(self.p, abs));
        };
        let width = u32::try_from(abs - vmin).map_err(|_| FieldError::Overflow)?;
        let mut w = BigUint::zero();
        for (val, unit) in terms {
            w += unit * pow_p(self.p, (val - vmin) as u32);
        }
        Self::from_residue(self.p, vmin, w, width)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, FieldError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, FieldError> {
        self.same_prime(o)?;
        let p = self.p;
        let add = |x: i64, y: i64| x.checked_add(y).ok_or(FieldError::Overflow);
        let repr = match (&self.repr, &o.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Repr::ExactZero,
            (Repr::Zero { abs: x }, Repr::Zero { abs: y }) => Repr::Zero { abs: add(*x, *y)? },
            (Repr::Zero { abs }, Repr::Unit { val, .. }) | (Repr::Unit { val, .. }, Repr::Zero { abs }) => {
                Repr::Zero { abs: add(*abs, *val)? }
            }
            (Repr::Unit { val: v1, unit: u1, rel: r1 }, Repr::Unit { val: v2, unit: u2, rel: r2 }) => {
                let rel = (*r1).min(*r2);
                Repr::Unit { val: add(*v1, *v2)?, unit: (u1 * u2) % pow_p(p, rel), rel }
            }
        };
        Ok(Truncated { p, repr })
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        match &self.repr {
            Repr::ExactZero => Err(FieldError::DivisionByZero),
            Repr::Zero { .. } => Err(FieldError::PrecisionExhausted),
            Repr::Unit { val, unit, rel } => {
                let m = BigInt::from(pow_p(self.p, *rel));
                let inv = mod_inverse(&BigInt::from(unit.clone()), &m).expect("unit is invertible");
                Ok(Truncated {
                    p: self.p,
                    repr: Repr::Unit {
                        val: val.checked_neg().ok_or(FieldError::Overflow)?,
                        unit: inv.to_biguint().expect("nonnegative"),
                        rel: *rel,
                    },
                })
            }
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self, FieldError> {
        self.mul(&o.inv()?)
    }

    /// Equality decided from the known digits; errors when the difference is a tracked zero.
    pub fn try_eq(&self, o: &Self) -> Result<bool, FieldError> {
        let d = self.sub(o)?;
        match d.repr {
            Repr::ExactZero => Ok(true),
            Repr::Unit { .. } => Ok(false),
            Repr::Zero { .. } => Err(FieldError::Indistinguishable),
        }
    }

    /// Size of the stored digits in bits.
    pub fn size_bits(&self) -> u64 {
        match &self.repr {
            Repr::Unit { unit, .. } => unit.bits(),
            _ => 0,
        }
    }
}

impl fmt::Display for Truncated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::ExactZero => write!(f, "0"),
            Repr::Zero { abs } => write!(f, "O({}^{})", self.p, abs),
            Repr::Unit { val, unit, rel } => {
                write!(f, "{}^{}·{} + O({}^{})", self.p, val, unit, self.p, val + *rel as i64)
            }
        }
    }
}

/// Cached data for a discriminant that stays irrational over ℚ_p.
#[derive(Debug)]
pub(crate) struct TruncDisc {
    pub disc: Arc<Disc>,
    pub d: Truncated,
}

/// An element `re + im·√D` of ℚ_p(√D) with truncated components.
///
/// When `D` is a square in ℚ_p the element is embedded in ℚ_p and `im` is
/// the exact zero, so only genuinely quadratic elements carry a discriminant.
#[derive(Clone, Debug)]
pub struct TruncatedElement {
    re: Truncated,
    im: Truncated,
    disc: Option<Arc<TruncDisc>>,
}

impl TruncatedElement {
    pub fn from_truncated(re: Truncated) -> Self {
        let p = re.prime();
        TruncatedElement { re, im: Truncated::exact_zero(p), disc: None }
    }

    /// Embeds an exact element with `rel` significant digits per component.
    pub fn embed(x: &ExactElement, p: Prime, rel: u32) -> Result<Self, FieldError> {
        let re = Truncated::from_rational(x.re(), p, rel);
        if x.im().is_zero() {
            return Ok(Self::from_truncated(re));
        }
        let disc = x.disc().expect("irrational element has a discriminant");
        if disc.splits_at(p) {
            // a + b·r with r the canonical root of D in ℚ_p
            let b = Truncated::from_rational(x.im(), p, rel + 2);
            let r = disc.root_in_qp(p, rel + 2);
            let v = re.add(&b.mul(&r)?)?;
            return Ok(Self::from_truncated(v));
        }
        let d_rel = rel.saturating_mul(2).max(64);
        let td = TruncDisc {
            disc: disc.clone(),
            d: Truncated::from_rational(&BigRational::from(disc.value().clone()), p, d_rel),
        };
        Ok(TruncatedElement { re, im: Truncated::from_rational(x.im(), p, rel), disc: Some(Arc::new(td)) })
    }

    pub fn re(&self) -> &Truncated {
        &self.re
    }

    pub fn im(&self) -> &Truncated {
        &self.im
    }

    pub fn prime(&self) -> Prime {
        self.re.prime()
    }

    fn join(&self, o: &Self) -> Result<Option<Arc<TruncDisc>>, FieldError> {
        match (&self.disc, &o.disc) {
            (None, None) => Ok(None),
            (Some(a), None) | (None, Some(a)) => Ok(Some(a.clone())),
            (Some(a), Some(b)) => {
                if a.disc.value() == b.disc.value() {
                    Ok(Some(a.clone()))
                } else {
                    Err(FieldError::IncompatibleExtensions(a.disc.value().to_string(), b.disc.value().to_string()))
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, FieldError> {
        Ok(TruncatedElement { re: self.re.add(&o.re)?, im: self.im.add(&o.im)?, disc: self.join(o)? })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, FieldError> {
        Ok(TruncatedElement { re: self.re.sub(&o.re)?, im: self.im.sub(&o.im)?, disc: self.join(o)? })
    }

    pub fn neg(&self) -> Self {
        TruncatedElement { re: self.re.neg(), im: self.im.neg(), disc: self.disc.clone() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, FieldError> {
        let disc = self.join(o)?;
        let Some(td) = &disc else {
            return Ok(Self::from_truncated(self.re.mul(&o.re)?));
        };
        let re = self.re.mul(&o.re)?.add(&td.d.mul(&self.im.mul(&o.im)?)?)?;
        let im = self.re.mul(&o.im)?.add(&self.im.mul(&o.re)?)?;
        Ok(TruncatedElement { re, im, disc })
    }

    /// `re² - D·im²`.
    fn norm_form(&self) -> Result<Truncated, FieldError> {
        match &self.disc {
            None => self.re.mul(&self.re),
            Some(td) => self.re.mul(&self.re)?.sub(&td.d.mul(&self.im.mul(&self.im)?)?),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self, FieldError> {
        let disc = self.join(o)?;
        if o.im.is_exact_zero() {
            let inv = o.re.inv()?;
            return Ok(TruncatedElement { re: self.re.mul(&inv)?, im: self.im.mul(&inv)?, disc });
        }
        let n = o.norm_form()?.inv()?;
        let conj = TruncatedElement { re: o.re.clone(), im: o.im.neg(), disc: o.disc.clone() };
        let num = self.mul(&conj)?;
        Ok(TruncatedElement { re: num.re.mul(&n)?, im: num.im.mul(&n)?, disc })
    }

    pub fn norm(&self) -> Result<Radius, FieldError> {
        if self.im.is_exact_zero() {
            return self.re.norm();
        }
        let n = self.norm_form()?;
        Ok(match n.norm()? {
            Radius::Finite(e) => Radius::Finite(e / BigRational::from(BigInt::from(2))),
            r => r,
        })
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.im.is_exact_zero()
    }

    /// Absolute precision of the less precise component.
    pub fn abs_precision(&self) -> Option<i64> {
        match (self.re.abs_precision(), self.im.abs_precision()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn size_bits(&self) -> u64 {
        self.re.size_bits().max(self.im.size_bits())
    }
}

impl fmt::Display for TruncatedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.disc {
            Some(td) if !self.im.is_exact_zero() => {
                write!(f, "({}) + ({})*sqrt({})", self.re, self.im, td.disc.value())
            }
            _ => write!(f, "{}", self.re),
        }
    }
}

impl PartialEq for TruncatedElement {
    fn eq(&self, o: &Self) -> bool {
        self.re == o.re && self.im == o.im
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_rational;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }
    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn cancellation_costs_digits() {
        let x = Truncated::from_rational(&q("13"), p(3), 3);
        let y = Truncated::from_rational(&q("4"), p(3), 3);
        let d = x.sub(&y).unwrap();
        assert_eq!(d.valuation().unwrap(), 2);
        assert_eq!(d.rel_precision(), 1);
        assert_eq!(d.unit_digits(), vec![1]);
    }

    #[test]
    fn tracked_zero_is_not_exact() {
        let x = Truncated::from_rational(&q("5"), p(5), 3);
        let d = x.sub(&x).unwrap();
        assert!(!d.is_nonzero());
        assert!(!d.is_exact_zero());
        assert_eq!(d.abs_precision(), Some(4));
        assert_eq!(d.norm(), Err(FieldError::PrecisionExhausted));
        assert_eq!(x.try_eq(&x), Err(FieldError::Indistinguishable));
    }

    #[test]
    fn multiplicative_precision() {
        let x = Truncated::from_rational(&q("2/9"), p(3), 5);
        let y = Truncated::from_rational(&q("27"), p(3), 3);
        let z = x.mul(&y).unwrap();
        assert_eq!(z.valuation().unwrap(), 1);
        assert_eq!(z.rel_precision(), 3);
        assert!(z.contains(&q("6")));
        let w = z.div(&y).unwrap();
        assert!(w.contains(&q("2/9")));
        assert!(!w.contains(&q("5/9")));
    }

    #[test]
    fn quadratic_norm() {
        // 1 + √3 over ℚ_3: norm form 1 - 3 = -2, unit
        let x = ExactElement::parse("1 + sqrt(3)").unwrap();
        let t = TruncatedElement::embed(&x, p(3), 10).unwrap();
        assert_eq!(t.norm().unwrap(), Radius::one());
        let s = ExactElement::parse("sqrt(3)").unwrap();
        let t = TruncatedElement::embed(&s, p(3), 10).unwrap();
        assert_eq!(t.norm().unwrap(), Radius::exp_ratio(-1, 2));
        let u = t.mul(&t).unwrap();
        assert!(u.im().is_exact_zero() || !u.im().is_nonzero());
        assert!(u.re().contains(&q("3")));
        let back = u.div(&t).unwrap();
        assert_eq!(back.norm().unwrap(), Radius::exp_ratio(-1, 2));
    }

    #[test]
    fn split_discriminant_embeds_in_base_field() {
        // 6 is a square in ℚ_5, so the element collapses to ℚ_5
        let x = ExactElement::parse("4 + sqrt(6)").unwrap();
        let t = TruncatedElement::embed(&x, p(5), 8).unwrap();
        assert!(t.im().is_exact_zero());
        assert!(t.re().is_nonzero());
    }
}
