//! Real dynamics of the distance from an orbit to a fixed point or cycle point.
//!
//! Around a fixed point with zero radius `α`, pole radius `β` and `C = |c|`,
//! the distance `r` moves by one of three piecewise maps, all divided by `C`:
//!
//! | shape          | `r < min`   | first breakpoint | between    | second breakpoint | `r > max` |
//! |----------------|-------------|------------------|------------|-------------------|-----------|
//! | zero inside    | `(α/β)r`    | `α*` at `α`      | `r²/β`     | `β*` at `β`       | `r`       |
//! | pole inside    | `(α/β)r`    | `β'` at `β`      | `α`        | `α'` at `α`       | `r`       |
//! | coincident     | `r`         | `α̂` at `α`       |            |                   | `r`       |
//!
//! The star values are orbit dependent. A spec either fixes them or defers
//! them to a provider that reads them off an actual orbit.

mod c1;
mod classify;
mod nofix;

pub use c1::{predict_c1, C1Branch, C1Model, C1Prediction, Regime};
pub use classify::{brute_force_verdict, same_cycle, CycleSearch, FixedSet, LimitVerdict, SetTerm, SpecCase};
pub use nofix::{nofix_spec, nofix_verdict, predict_nofix, NofixPrediction};

use crate::field::Radius;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RadiusError {
    #[error("invalid radius map: {0}")]
    Invalid(String),
    #[error("star value at the {0:?} breakpoint is required")]
    StarValueRequired(Breakpoint),
    #[error("could not resolve the limit within the search bound")]
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `α < β`.
    ZeroInside,
    /// `β < α`.
    PoleInside,
    /// `α = β`.
    Coincident,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Breakpoint {
    ZeroRadius,
    PoleRadius,
}

/// What is known about the next radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Exact(Radius),
    AtMost(Radius),
    AtLeast(Radius),
    Free,
}

impl Constraint {
    pub fn admits(&self, r: &Radius) -> bool {
        match self {
            Constraint::Exact(x) => r == x,
            Constraint::AtMost(x) => r <= x,
            Constraint::AtLeast(x) => r >= x,
            Constraint::Free => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiecewiseSpec {
    shape: Shape,
    alpha: Radius,
    beta: Radius,
    c_norm: Radius,
    /// Star value at `α` (`α*`, `α'` or `α̂`); `None` when deferred.
    alpha_star: Option<Radius>,
    /// Star value at `β` (`β*` or `β'`); unused for the coincident shape.
    beta_star: Option<Radius>,
}

impl PiecewiseSpec {
    /// Picks the shape from the order of `α` and `β`; star values deferred.
    pub fn from_radii(alpha: Radius, beta: Radius, c_norm: Radius) -> Result<Self, RadiusError> {
        let shape = match alpha.cmp(&beta) {
            std::cmp::Ordering::Less => Shape::ZeroInside,
            std::cmp::Ordering::Greater => Shape::PoleInside,
            std::cmp::Ordering::Equal => Shape::Coincident,
        };
        let spec = PiecewiseSpec { shape, alpha, beta, c_norm, alpha_star: None, beta_star: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn zero_inside(alpha: Radius, beta: Radius, c_norm: Radius, stars: Option<(Radius, Radius)>) -> Result<Self, RadiusError> {
        Self::build(Shape::ZeroInside, alpha, beta, c_norm, stars)
    }

    pub fn pole_inside(alpha: Radius, beta: Radius, c_norm: Radius, stars: Option<(Radius, Radius)>) -> Result<Self, RadiusError> {
        Self::build(Shape::PoleInside, alpha, beta, c_norm, stars)
    }

    pub fn coincident(alpha: Radius, c_norm: Radius, star: Option<Radius>) -> Result<Self, RadiusError> {
        let spec = PiecewiseSpec {
            shape: Shape::Coincident,
            beta: alpha.clone(),
            alpha,
            c_norm,
            alpha_star: star,
            beta_star: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn build(shape: Shape, alpha: Radius, beta: Radius, c_norm: Radius, stars: Option<(Radius, Radius)>) -> Result<Self, RadiusError> {
        let (alpha_star, beta_star) = match stars {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        let spec = PiecewiseSpec { shape, alpha, beta, c_norm, alpha_star, beta_star };
        spec.validate()?;
        Ok(spec)
    }

    /// The same map with fixed star values.
    pub fn with_stars(&self, alpha_star: Radius, beta_star: Option<Radius>) -> Result<Self, RadiusError> {
        let mut s = self.clone();
        s.alpha_star = Some(alpha_star);
        s.beta_star = if s.shape == Shape::Coincident { None } else { beta_star };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), RadiusError> {
        let bad = |m: String| Err(RadiusError::Invalid(m));
        if !self.c_norm.is_finite_nonzero() {
            return bad("|c| must be finite and nonzero".into());
        }
        if matches!(self.alpha, Radius::Infinity) || matches!(self.beta, Radius::Infinity) {
            return bad("breakpoints must be finite".into());
        }
        match self.shape {
            Shape::ZeroInside => {
                if self.alpha >= self.beta {
                    return bad("zero-inside map needs α < β".into());
                }
                if let Some(s) = &self.alpha_star {
                    let cap = &self.alpha.square() / &self.beta;
                    if s > &cap {
                        return bad(format!("α* = {s} exceeds α²/β = {cap}"));
                    }
                }
                if let Some(s) = &self.beta_star {
                    if s < &self.beta || matches!(s, Radius::Infinity) {
                        return bad(format!("β* = {s} must be finite and at least β = {}", self.beta));
                    }
                }
            }
            Shape::PoleInside => {
                if self.beta >= self.alpha || self.beta.is_zero() {
                    return bad("pole-inside map needs 0 < β < α".into());
                }
                if let Some(s) = &self.alpha_star {
                    if s > &self.alpha {
                        return bad(format!("α' = {s} exceeds α = {}", self.alpha));
                    }
                }
                if let Some(s) = &self.beta_star {
                    if s < &self.alpha || matches!(s, Radius::Infinity) {
                        return bad(format!("β' = {s} must be finite and at least α = {}", self.alpha));
                    }
                }
            }
            Shape::Coincident => {
                if self.alpha != self.beta || self.alpha.is_zero() {
                    return bad("coincident map needs α = β > 0".into());
                }
                if matches!(self.alpha_star, Some(Radius::Infinity)) {
                    return bad("α̂ must be finite".into());
                }
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }
    pub fn alpha(&self) -> &Radius {
        &self.alpha
    }
    pub fn beta(&self) -> &Radius {
        &self.beta
    }
    pub fn c_norm(&self) -> &Radius {
        &self.c_norm
    }
    pub fn alpha_star(&self) -> Option<&Radius> {
        self.alpha_star.as_ref()
    }
    pub fn beta_star(&self) -> Option<&Radius> {
        self.beta_star.as_ref()
    }
    pub fn is_deferred(&self) -> bool {
        self.alpha_star.is_none() || (self.shape != Shape::Coincident && self.beta_star.is_none())
    }

    /// The breakpoint `r` sits on, if any. Zero is never a breakpoint.
    pub fn breakpoint(&self, r: &Radius) -> Option<Breakpoint> {
        if r.is_zero() {
            None
        } else if r == &self.alpha {
            Some(Breakpoint::ZeroRadius)
        } else if r == &self.beta {
            Some(Breakpoint::PoleRadius)
        } else {
            None
        }
    }

    /// Range a star value must lie in, before division by `|c|`.
    pub fn star_constraint(&self, bp: Breakpoint) -> Constraint {
        match (self.shape, bp) {
            (Shape::ZeroInside, Breakpoint::ZeroRadius) => Constraint::AtMost(&self.alpha.square() / &self.beta),
            (Shape::ZeroInside, Breakpoint::PoleRadius) => Constraint::AtLeast(self.beta.clone()),
            (Shape::PoleInside, Breakpoint::ZeroRadius) => Constraint::AtMost(self.alpha.clone()),
            (Shape::PoleInside, Breakpoint::PoleRadius) => Constraint::AtLeast(self.alpha.clone()),
            (Shape::Coincident, _) => Constraint::Free,
        }
    }

    /// Constraint on the next radius, `star_constraint / |c|`.
    pub fn next_constraint(&self, r: &Radius) -> Constraint {
        match self.breakpoint(r) {
            None => Constraint::Exact(self.regular_step(r).expect("off breakpoints")),
            Some(bp) => match self.star_constraint(bp) {
                Constraint::AtMost(x) => Constraint::AtMost(&x / &self.c_norm),
                Constraint::AtLeast(x) => Constraint::AtLeast(&x / &self.c_norm),
                other => other,
            },
        }
    }

    /// The value off the breakpoints; `None` on a breakpoint.
    pub fn regular_step(&self, r: &Radius) -> Option<Radius> {
        if r.is_zero() {
            return Some(Radius::Zero);
        }
        if matches!(r, Radius::Infinity) {
            return Some(Radius::Infinity);
        }
        if self.breakpoint(r).is_some() {
            return None;
        }
        let (a, b, c) = (&self.alpha, &self.beta, &self.c_norm);
        let v = match self.shape {
            Shape::ZeroInside => {
                if r < a {
                    &(a * r) / b
                } else if r < b {
                    &r.square() / b
                } else {
                    r.clone()
                }
            }
            Shape::PoleInside => {
                if r < b {
                    &(a * r) / b
                } else if r < a {
                    a.clone()
                } else {
                    r.clone()
                }
            }
            Shape::Coincident => r.clone(),
        };
        Some(&v / c)
    }

    /// One step with the fixed star values.
    pub fn step(&self, r: &Radius) -> Result<Radius, RadiusError> {
        self.step_with(r, |_| None)
    }

    /// One step; on a breakpoint without a fixed star value the provider is asked.
    pub fn step_with(&self, r: &Radius, provider: impl FnOnce(Breakpoint) -> Option<Radius>) -> Result<Radius, RadiusError> {
        if let Some(v) = self.regular_step(r) {
            return Ok(v);
        }
        let bp = self.breakpoint(r).expect("regular_step failed only on breakpoints");
        let fixed = match bp {
            Breakpoint::ZeroRadius => self.alpha_star.clone(),
            Breakpoint::PoleRadius => self.beta_star.clone(),
        };
        let star = fixed.or_else(|| provider(bp)).ok_or(RadiusError::StarValueRequired(bp))?;
        Ok(&star / &self.c_norm)
    }

    /// Iterates `n` steps from `r`, returning `n + 1` radii.
    pub fn orbit(&self, r: &Radius, n: usize) -> Result<Vec<Radius>, RadiusError> {
        let mut out = vec![r.clone()];
        for _ in 0..n {
            let next = self.step(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

/// One entry of a predicted radius schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scheduled {
    pub bound: Constraint,
    /// The radius itself once it is pinned down.
    pub value: Option<Radius>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    /// Entry `n` describes the radius after `n` steps. The list stops after the
    /// first breakpoint the provider could not resolve.
    pub entries: Vec<Scheduled>,
    /// Steps whose provided star value broke the breakpoint constraint.
    pub violations: Vec<usize>,
}

impl Schedule {
    pub fn values(&self) -> Vec<Option<Radius>> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }
}

impl PiecewiseSpec {
    /// Predicts `steps` radii from `r`. At a breakpoint reached after `n` steps
    /// the provider is asked for the star value `provider(n, bp)`.
    pub fn schedule(&self, r: &Radius, steps: usize, mut provider: impl FnMut(usize, Breakpoint) -> Option<Radius>) -> Schedule {
        let mut entries = vec![Scheduled { bound: Constraint::Exact(r.clone()), value: Some(r.clone()) }];
        let mut violations = Vec::new();
        let mut cur = r.clone();
        for n in 0..steps {
            let bound = self.next_constraint(&cur);
            let fixed_star = self.breakpoint(&cur).and_then(|bp| match bp {
                Breakpoint::ZeroRadius => self.alpha_star.clone(),
                Breakpoint::PoleRadius => self.beta_star.clone(),
            });
            let next = match (&bound, self.breakpoint(&cur)) {
                (Constraint::Exact(v), _) => Some(v.clone()),
                (_, Some(bp)) => fixed_star.or_else(|| provider(n, bp)).map(|star| {
                    if !self.star_constraint(bp).admits(&star) {
                        violations.push(n + 1);
                    }
                    &star / &self.c_norm
                }),
                (_, None) => unreachable!("inexact bound only on breakpoints"),
            };
            match next {
                Some(v) => {
                    entries.push(Scheduled { bound, value: Some(v.clone()) });
                    cur = v;
                }
                None => {
                    entries.push(Scheduled { bound, value: None });
                    break;
                }
            }
        }
        Schedule { entries, violations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(e: i64) -> Radius {
        Radius::exp(e)
    }

    #[test]
    fn zero_inside_table() {
        let s = PiecewiseSpec::zero_inside(r(-1), r(0), r(0), Some((r(-2), r(0)))).unwrap();
        assert_eq!(s.step(&r(-2)).unwrap(), r(-3));
        assert_eq!(s.step(&r(1)).unwrap(), r(1));
        assert_eq!(s.step(&r(-1)).unwrap(), r(-2));
        assert_eq!(s.step(&r(0)).unwrap(), r(0));
        assert_eq!(s.step(&Radius::Zero).unwrap(), Radius::Zero);
        let between = PiecewiseSpec::zero_inside(r(-2), r(0), r(0), None).unwrap();
        assert_eq!(between.step(&r(-1)).unwrap(), r(-2));
        assert_eq!(between.step(&r(-2)), Err(RadiusError::StarValueRequired(Breakpoint::ZeroRadius)));
        assert_eq!(between.step_with(&r(-2), |_| Some(r(-7))).unwrap(), r(-7));
    }

    #[test]
    fn pole_inside_table_scaled() {
        // α = p^2, β = p^0, |c| = p^1
        let s = PiecewiseSpec::pole_inside(r(2), r(0), r(1), Some((r(1), r(3)))).unwrap();
        assert_eq!(s.step(&r(-1)).unwrap(), r(0));
        assert_eq!(s.step(&Radius::exp_ratio(1, 2)).unwrap(), r(1));
        assert_eq!(s.step(&r(5)).unwrap(), r(4));
        assert_eq!(s.step(&r(0)).unwrap(), r(2));
        assert_eq!(s.step(&r(2)).unwrap(), r(0));
    }

    #[test]
    fn coincident_is_identity_off_breakpoint() {
        let s = PiecewiseSpec::coincident(r(-1), r(0), Some(r(-4))).unwrap();
        for e in [-5, 0, 3] {
            assert_eq!(s.step(&r(e)).unwrap(), r(e));
        }
        assert_eq!(s.step(&r(-1)).unwrap(), r(-4));
    }

    #[test]
    fn star_constraints_enforced() {
        // α* = α is illegal when α < β: α²/β < α
        assert!(PiecewiseSpec::zero_inside(r(-1), r(0), r(0), Some((r(-1), r(0)))).is_err());
        assert!(PiecewiseSpec::zero_inside(r(-1), r(0), r(0), Some((r(-2), r(-1)))).is_err());
        assert!(PiecewiseSpec::pole_inside(r(1), r(0), r(0), Some((r(2), r(1)))).is_err());
        assert!(PiecewiseSpec::pole_inside(r(1), r(0), r(0), Some((r(1), r(0)))).is_err());
        assert!(PiecewiseSpec::zero_inside(r(0), r(0), r(0), None).is_err());
        assert!(PiecewiseSpec::pole_inside(r(0), Radius::Zero, r(0), None).is_err());
    }

    #[test]
    fn next_constraints() {
        let s = PiecewiseSpec::zero_inside(r(-1), r(0), r(1), None).unwrap();
        assert_eq!(s.next_constraint(&r(-1)), Constraint::AtMost(r(-3)));
        assert_eq!(s.next_constraint(&r(0)), Constraint::AtLeast(r(-1)));
        assert_eq!(s.next_constraint(&r(5)), Constraint::Exact(r(4)));
    }

    #[test]
    fn schedules_stop_at_unresolved_breakpoints() {
        let s = PiecewiseSpec::zero_inside(r(-2), r(0), r(0), None).unwrap();
        let sch = s.schedule(&r(-1), 5, |_, _| None);
        assert_eq!(sch.values(), vec![Some(r(-1)), Some(r(-2)), None]);
        assert_eq!(sch.entries[2].bound, Constraint::AtMost(r(-4)));
        let sch = s.schedule(&r(-1), 3, |n, bp| {
            assert_eq!((n, bp), (1, Breakpoint::ZeroRadius));
            Some(r(-3))
        });
        assert_eq!(sch.values(), vec![Some(r(-1)), Some(r(-2)), Some(r(-3)), Some(r(-5))]);
        assert_eq!(sch.violations, vec![2]);
    }
}
