use super::exact::ExactElement;
use super::norm::Radius;
use super::truncated::TruncatedElement;
use super::{FieldError, Prime};
use std::fmt;

/// Arithmetic shared by the exact and truncated backends.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + Send + Sync + Sized {
    /// Embeds an exact element; `rel` is the number of significant digits kept by
    /// truncated backends and is ignored by the exact one.
    fn embed(x: &ExactElement, p: Prime, rel: u32) -> Result<Self, FieldError>;
    fn add(&self, rhs: &Self) -> Result<Self, FieldError>;
    fn sub(&self, rhs: &Self) -> Result<Self, FieldError>;
    fn mul(&self, rhs: &Self) -> Result<Self, FieldError>;
    fn div(&self, rhs: &Self) -> Result<Self, FieldError>;
    fn norm(&self, p: Prime) -> Result<Radius, FieldError>;
    /// `Ok(true)` only for a certain zero; a tracked zero is `PrecisionExhausted`.
    fn is_zero(&self) -> Result<bool, FieldError>;
    fn size_bits(&self) -> u64;
    /// Absolute precision, `None` when exact.
    fn abs_precision(&self) -> Option<i64>;
    /// The exact value, when the backend has one.
    fn exact(&self) -> Option<&ExactElement>;
}

impl Scalar for ExactElement {
    fn embed(x: &ExactElement, _p: Prime, _rel: u32) -> Result<Self, FieldError> {
        Ok(x.clone())
    }
    fn add(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.try_add(rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.try_sub(rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.try_mul(rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.try_div(rhs)
    }
    fn norm(&self, p: Prime) -> Result<Radius, FieldError> {
        Ok(ExactElement::norm(self, p))
    }
    fn is_zero(&self) -> Result<bool, FieldError> {
        Ok(ExactElement::is_zero(self))
    }
    fn size_bits(&self) -> u64 {
        ExactElement::size_bits(self)
    }
    fn abs_precision(&self) -> Option<i64> {
        None
    }
    fn exact(&self) -> Option<&ExactElement> {
        Some(self)
    }
}

impl Scalar for TruncatedElement {
    fn embed(x: &ExactElement, p: Prime, rel: u32) -> Result<Self, FieldError> {
        TruncatedElement::embed(x, p, rel)
    }
    fn add(&self, rhs: &Self) -> Result<Self, FieldError> {
        TruncatedElement::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, FieldError> {
        TruncatedElement::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, FieldError> {
        TruncatedElement::mul(self, rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self, FieldError> {
        TruncatedElement::div(self, rhs)
    }
    fn norm(&self, _p: Prime) -> Result<Radius, FieldError> {
        TruncatedElement::norm(self)
    }
    fn is_zero(&self) -> Result<bool, FieldError> {
        if self.is_exact_zero() {
            Ok(true)
        } else if self.re().is_nonzero() || self.im().is_nonzero() {
            Ok(false)
        } else {
            Err(FieldError::PrecisionExhausted)
        }
    }
    fn size_bits(&self) -> u64 {
        TruncatedElement::size_bits(self)
    }
    fn abs_precision(&self) -> Option<i64> {
        TruncatedElement::abs_precision(self)
    }
    fn exact(&self) -> Option<&ExactElement> {
        None
    }
}
