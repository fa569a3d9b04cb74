//! Exact p-adic dynamics of (2,1)-rational maps
//!
//! `f(x) = (x² + ax + b)/(cx + d)` over ℚ_p and quadratic extensions ℚ_p(√D).
//!
//! The crate is organised bottom-up:
//!
//! - [`field`]: exact elements of ℚ(√D), p-adic valuations and norms, canonical
//!   digit expansions, Hensel square roots, and a truncated backend that tracks
//!   how many p-adic digits of every intermediate result are justified.
//! - [`map`]: parameter validation, case classification, evaluation and
//!   derivatives, fixed points, the 2-cycle of the fixed-point-free case, and
//!   the local geometry (zero and pole radii) around each fixed point.
//! - [`radius`]: the real piecewise maps that drive the distance of an orbit to
//!   a fixed point or cycle point, with exact limit classification, fixed-point
//!   sets and cycle search.
//! - [`orbit`]: orbit iteration in exact and truncated arithmetic, exceptional
//!   (pole-hitting) points, sphere sampling, and step-by-step verification of
//!   the observed orbit radii against the radius dynamics.
//! - [`cli`]: the `padyn` command line front end.
//!
//! See `examples/` for one runnable program per capability.

pub mod cli;
pub mod field;
pub mod map;
pub mod orbit;
pub mod radius;

pub use field::{ExactElement, ExtValuation, FieldError, Prime, Radius, Truncated, TruncatedElement};
pub use map::{CaseTag, FixedPointInfo, LocalType, MapError, MapParams, TwoCycleInfo};
