//! Radius predictions around the 2-cycle of a map without fixed points.
//!
//! The orbit swaps between neighbourhoods of `t₁` and `t₂` every step. The
//! distance to the current cycle point follows the coincident map at `h`
//! when `p ≠ 3`, and the zero-inside map with `α = h/3, β = h` when `p = 3`.

use super::{Constraint, LimitVerdict, PiecewiseSpec, Schedule};
use crate::field::{Prime, Radius};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NofixPrediction {
    pub verdict: LimitVerdict,
    pub schedule: Schedule,
    /// Index of the cycle point the orbit is near after each step; starts at `start_anchor`.
    pub anchors: Vec<usize>,
}

/// The radius map for cycle radius `h`, star values deferred.
pub fn nofix_spec(h: &Radius, p: Prime) -> PiecewiseSpec {
    let one = Radius::one();
    if p.get() == 3 {
        PiecewiseSpec::zero_inside(h / &Radius::exp(1), h.clone(), one, None)
    } else {
        PiecewiseSpec::coincident(h.clone(), one, None)
    }
    .expect("h is finite and nonzero")
}

pub fn nofix_verdict(h: &Radius, p: Prime, r: &Radius) -> LimitVerdict {
    if r.is_zero() {
        return LimitVerdict::Fixed(Radius::Zero);
    }
    if r == h {
        let bound = if p.get() == 3 { Constraint::AtLeast(h.clone()) } else { Constraint::Free };
        return LimitVerdict::LandsInSphereSet { bound, note: "the cycle sphere is not invariant; the next radius is orbit dependent".into() };
    }
    if p.get() == 3 && r < h {
        LimitVerdict::ConvergesTo(Radius::Zero)
    } else {
        LimitVerdict::Fixed(r.clone())
    }
}

/// `steps`-step prediction for an orbit at distance `r` from cycle point `start_anchor`.
pub fn predict_nofix(h: &Radius, p: Prime, r: &Radius, start_anchor: usize, steps: usize, mut provider: impl FnMut(usize) -> Option<Radius>) -> NofixPrediction {
    let schedule = nofix_spec(h, p).schedule(r, steps, |n, _| provider(n));
    let anchors = (0..schedule.entries.len()).map(|n| (start_anchor + n) % 2).collect();
    NofixPrediction { verdict: nofix_verdict(h, p, r), schedule, anchors }
}
