//! Radius predictions around the single fixed point of a `c = 1` map.
//!
//! With critical radius `δ` and multiplier norm `q`, the distance to the
//! fixed point moves by the zero-inside map with `α = qδ, β = δ` when
//! attracting, the pole-inside map with `α = qδ, β = δ` when repelling, and
//! the coincident map at `δ` when indifferent.

use super::{Constraint, LimitVerdict, PiecewiseSpec, RadiusError, Schedule};
use crate::field::Radius;
use crate::map::LocalType;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Attracting,
    Indifferent,
    Repelling,
}

impl From<LocalType> for Regime {
    fn from(t: LocalType) -> Self {
        match t {
            LocalType::Attracting => Regime::Attracting,
            LocalType::Indifferent => Regime::Indifferent,
            LocalType::Repelling => Regime::Repelling,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C1Model {
    pub regime: Regime,
    pub delta: Radius,
    pub q: Radius,
}

/// Where a starting radius sits relative to `qδ`, `δ` and `δq`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum C1Branch {
    Zero,
    /// Strictly inside every breakpoint.
    Inside,
    /// On `qδ` (attracting only).
    InnerSphere,
    /// On `δ`.
    Critical,
    /// Between `δ` and `δq` (repelling only).
    Between,
    /// On `δq` (repelling only).
    OuterSphere,
    /// Beyond every breakpoint.
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C1Prediction {
    pub branch: C1Branch,
    pub verdict: LimitVerdict,
    pub schedule: Schedule,
}

impl C1Model {
    pub fn new(regime: Regime, delta: Radius, q: Radius) -> Result<Self, RadiusError> {
        let one = Radius::one();
        let ok = match regime {
            Regime::Attracting => q < one,
            Regime::Indifferent => q == one,
            Regime::Repelling => q > one && q != Radius::Infinity,
        };
        if !ok || !delta.is_finite_nonzero() {
            return Err(RadiusError::Invalid(format!("{regime:?} needs a matching q, got q = {q}, δ = {delta}")));
        }
        Ok(C1Model { regime, delta, q })
    }

    /// The radius map with star values deferred.
    pub fn spec(&self) -> PiecewiseSpec {
        let one = Radius::one();
        let qd = &self.q * &self.delta;
        match self.regime {
            Regime::Attracting => PiecewiseSpec::zero_inside(qd, self.delta.clone(), one, None),
            Regime::Repelling => PiecewiseSpec::pole_inside(qd, self.delta.clone(), one, None),
            Regime::Indifferent => PiecewiseSpec::coincident(self.delta.clone(), one, None),
        }
        .expect("validated model")
    }

    pub fn branch(&self, r: &Radius) -> C1Branch {
        let d = &self.delta;
        let qd = &self.q * d;
        if r.is_zero() {
            return C1Branch::Zero;
        }
        match self.regime {
            Regime::Attracting if r == &qd => C1Branch::InnerSphere,
            Regime::Repelling if r == &qd => C1Branch::OuterSphere,
            Regime::Repelling if r > d && r < &qd => C1Branch::Between,
            Regime::Repelling if r > &qd => C1Branch::Outside,
            _ if r == d => C1Branch::Critical,
            _ if r < d => C1Branch::Inside,
            _ => C1Branch::Outside,
        }
    }

    /// The limit that holds for every orbit starting at distance `r`.
    pub fn verdict(&self, r: &Radius) -> LimitVerdict {
        let d = &self.delta;
        let qd = &self.q * d;
        let branch = self.branch(r);
        match (self.regime, branch) {
            (_, C1Branch::Zero) => LimitVerdict::Fixed(Radius::Zero),
            (Regime::Attracting, C1Branch::Inside | C1Branch::InnerSphere) => LimitVerdict::ConvergesTo(Radius::Zero),
            (Regime::Attracting, C1Branch::Critical) => LimitVerdict::LandsInSphereSet {
                bound: Constraint::AtLeast(d.clone()),
                note: "stays on the critical sphere or jumps to a larger invariant sphere".into(),
            },
            (Regime::Indifferent, C1Branch::Critical) => LimitVerdict::LandsInSphereSet {
                bound: Constraint::Free,
                note: "the critical sphere is not invariant; the next radius is orbit dependent".into(),
            },
            (Regime::Repelling, C1Branch::Inside) => {
                // climbs by q until it lands on δ or jumps over it
                let mut x = r.clone();
                while &x < d {
                    x = &x * &self.q;
                }
                if &x == d {
                    LimitVerdict::LandsInSphereSet { bound: Constraint::AtLeast(qd), note: "lands on δ, then leaves to radius at least δq".into() }
                } else {
                    LimitVerdict::LandsInSphereSet { bound: Constraint::AtMost(qd), note: "plateaus at δq, then radius at most δq".into() }
                }
            }
            (Regime::Repelling, C1Branch::Critical) => {
                LimitVerdict::LandsInSphereSet { bound: Constraint::AtLeast(qd), note: "radius at least δq after one step".into() }
            }
            (Regime::Repelling, C1Branch::Between | C1Branch::OuterSphere) => {
                LimitVerdict::LandsInSphereSet { bound: Constraint::AtMost(qd), note: "reaches δq, then radius at most δq".into() }
            }
            _ => LimitVerdict::Fixed(r.clone()),
        }
    }
}

/// Verdict and `steps`-step schedule for distance `r`. The provider returns
/// the observed next radius when the orbit sits on a breakpoint after `n` steps.
pub fn predict_c1(model: &C1Model, r: &Radius, steps: usize, mut provider: impl FnMut(usize) -> Option<Radius>) -> C1Prediction {
    let schedule = model.spec().schedule(r, steps, |n, _| provider(n));
    C1Prediction { branch: model.branch(r), verdict: model.verdict(r), schedule }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(e: i64) -> Radius {
        Radius::exp(e)
    }

    #[test]
    fn repeller_staircase() {
        let m = C1Model::new(Regime::Repelling, r(-1), r(1)).unwrap();
        let p = predict_c1(&m, &r(-2), 2, |_| None);
        assert_eq!(p.schedule.values(), vec![Some(r(-2)), Some(r(-1)), None]);
        assert_eq!(p.schedule.entries[2].bound, Constraint::AtLeast(r(0)));
        assert_eq!(p.branch, C1Branch::Inside);
        assert!(matches!(p.verdict, LimitVerdict::LandsInSphereSet { bound: Constraint::AtLeast(_), .. }));
        // off the staircase the orbit plateaus at δq
        let p = predict_c1(&m, &Radius::exp_ratio(-3, 2), 3, |_| Some(r(-2)));
        assert_eq!(
            p.schedule.values(),
            vec![Some(Radius::exp_ratio(-3, 2)), Some(Radius::exp_ratio(-1, 2)), Some(r(0)), Some(r(-2))]
        );
        assert!(p.schedule.violations.is_empty());
        assert_eq!(m.verdict(&r(3)), LimitVerdict::Fixed(r(3)));
    }

    #[test]
    fn attracting_and_indifferent() {
        let a = C1Model::new(Regime::Attracting, r(0), r(-1)).unwrap();
        assert_eq!(a.verdict(&r(1)), LimitVerdict::Fixed(r(1)));
        assert_eq!(a.verdict(&r(-3)), LimitVerdict::ConvergesTo(Radius::Zero));
        let p = predict_c1(&a, &r(1), 10, |_| None);
        assert!(p.schedule.values().iter().all(|v| v == &Some(r(1))));
        let i = C1Model::new(Regime::Indifferent, r(0), r(0)).unwrap();
        for e in [-3, 2] {
            let p = predict_c1(&i, &r(e), 10, |_| None);
            assert!(p.schedule.values().iter().all(|v| v == &Some(r(e))));
            assert_eq!(p.verdict, LimitVerdict::Fixed(r(e)));
        }
        assert!(C1Model::new(Regime::Attracting, r(0), r(0)).is_err());
        // multiplier zero: the inner breakpoint is at radius zero
        let z = C1Model::new(Regime::Attracting, r(0), Radius::Zero).unwrap();
        assert_eq!(predict_c1(&z, &r(-1), 2, |_| None).schedule.values(), vec![Some(r(-1)), Some(r(-2)), Some(r(-4))]);
    }
}
