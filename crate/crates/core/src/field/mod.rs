//! p-adic arithmetic over ℚ and quadratic extensions ℚ(√D).
//!
//! Two backends share the [`Scalar`] interface:
//!
//! - [`ExactElement`]: `a + b√D` with exact rational components. Norms are
//!   computed exactly, through the norm form when `D` is not a square in ℚ_p
//!   and through a Hensel-lifted embedding when it is.
//! - [`TruncatedElement`]: components known modulo a power of `p`, with the
//!   number of justified digits propagated through every operation.

mod exact;
mod hensel;
mod norm;
pub mod rational;
mod scalar;
mod truncated;

pub use exact::{Disc, ExactElement};
pub use hensel::{sqrt_class, SqrtClass};
pub use norm::{ExtValuation, Radius};
pub use rational::{digits, parse_rational};
pub use scalar::Scalar;
pub use truncated::{Truncated, TruncatedElement};

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no canonical expansion of 0")]
    ZeroExpansion,
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("elements live in different extensions Q(sqrt({0})) and Q(sqrt({1}))")]
    IncompatibleExtensions(String, String),
    #[error("elements are taken over different primes {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("tracked precision exhausted")]
    PrecisionExhausted,
    #[error("elements cannot be distinguished at the tracked precision")]
    Indistinguishable,
    #[error("valuation out of range")]
    Overflow,
}

/// A rational prime, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for Prime {
    type Error = FieldError;
    fn try_from(p: u64) -> Result<Self, FieldError> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut i = 3u64;
    while i.saturating_mul(i) <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_checks() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        assert_eq!(Prime::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(Prime::new(91), Err(FieldError::NotPrime(91)));
        assert!(Prime::new(0).is_err());
    }

    #[test]
    fn prime_serde() {
        let p: Prime = serde_json::from_str("7").unwrap();
        assert_eq!(p.get(), 7);
        assert!(serde_json::from_str::<Prime>("8").is_err());
    }
}
