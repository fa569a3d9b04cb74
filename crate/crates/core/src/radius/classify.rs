//! Limits, fixed points and cycles of the piecewise radius maps.
//!
//! Limits are decided exactly. Off the breakpoints each branch acts on the
//! exponent `e` of `r = p^e` as a shift, a constant, or `e ↦ 2e - (b + k)`,
//! so a whole run inside one branch is jumped over in closed form. Only the
//! breakpoints are visited one at a time, and a revisited breakpoint closes a
//! cycle.

use super::{Breakpoint, Constraint, PiecewiseSpec, RadiusError, Shape};
use crate::field::Radius;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitVerdict {
    /// The orbit reaches or tends to this radius (and stays).
    ConvergesTo(Radius),
    /// The starting radius is itself fixed.
    Fixed(Radius),
    /// The orbit is eventually periodic with period `k ≥ 2`.
    EntersCycle { cycle: Vec<Radius>, k: usize },
    DivergesToInfinity,
    /// Orbit-dependent: the orbit ends up on some sphere whose radius satisfies `bound`.
    LandsInSphereSet { bound: Constraint, note: String },
}

/// The parameter regime of a spec with fixed star values. "Pinned" means the
/// star value equals `|c|` times its breakpoint, which makes the breakpoint fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpecCase {
    ZeroInsideIsometric,
    ZeroInsideExpandingFree,
    ZeroInsideExpandingPinned,
    /// `|c| < 1`, `α < |c|β`.
    ZeroInsideContractingGap,
    /// `|c| < 1`, `α = |c|β`, `α* = |c|α`.
    ZeroInsideContractingFlatPinned,
    ZeroInsideContractingFlatFree,
    /// `|c| < 1`, `α > |c|β`, `α* = |c|α`.
    ZeroInsideContractingSteepPinned,
    ZeroInsideContractingSteepHigh,
    ZeroInsideContractingSteepLow,
    PoleInsideIsometricPinned,
    PoleInsideIsometricFree,
    PoleInsideContractingPinned,
    PoleInsideContractingFree,
    /// `|c| > 1`, `α > |c|β`.
    PoleInsideExpandingSteep,
    /// `|c| > 1`, `α = |c|β`.
    PoleInsideExpandingBalanced,
    /// `|c| > 1`, `α < |c|β`, `β' = |c|β`.
    PoleInsideExpandingShallowPinned,
    PoleInsideExpandingShallowFree,
    CoincidentIsometricPinned,
    CoincidentIsometricFree,
    CoincidentExpandingPinned,
    CoincidentExpandingFree,
    CoincidentContractingPinned,
    CoincidentContractingFree,
}

impl SpecCase {
    pub const ALL: [SpecCase; 23] = [
        SpecCase::ZeroInsideIsometric,
        SpecCase::ZeroInsideExpandingFree,
        SpecCase::ZeroInsideExpandingPinned,
        SpecCase::ZeroInsideContractingGap,
        SpecCase::ZeroInsideContractingFlatPinned,
        SpecCase::ZeroInsideContractingFlatFree,
        SpecCase::ZeroInsideContractingSteepPinned,
        SpecCase::ZeroInsideContractingSteepHigh,
        SpecCase::ZeroInsideContractingSteepLow,
        SpecCase::PoleInsideIsometricPinned,
        SpecCase::PoleInsideIsometricFree,
        SpecCase::PoleInsideContractingPinned,
        SpecCase::PoleInsideContractingFree,
        SpecCase::PoleInsideExpandingSteep,
        SpecCase::PoleInsideExpandingBalanced,
        SpecCase::PoleInsideExpandingShallowPinned,
        SpecCase::PoleInsideExpandingShallowFree,
        SpecCase::CoincidentIsometricPinned,
        SpecCase::CoincidentIsometricFree,
        SpecCase::CoincidentExpandingPinned,
        SpecCase::CoincidentExpandingFree,
        SpecCase::CoincidentContractingPinned,
        SpecCase::CoincidentContractingFree,
    ];
}

/// One piece of a fixed-point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetTerm {
    Point(Radius),
    /// The open interval `(lo, hi)`.
    Open { lo: Radius, hi: Radius },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedSet {
    pub terms: Vec<SetTerm>,
}

impl FixedSet {
    pub fn contains(&self, r: &Radius) -> bool {
        self.terms.iter().any(|t| match t {
            SetTerm::Point(x) => x == r,
            SetTerm::Open { lo, hi } => lo < r && r < hi,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleSearch {
    Fixed(Radius),
    Cycle { cycle: Vec<Radius>, k: usize, entry: usize },
    NoCycleWithinBound,
}

enum Branch {
    Linear(BigRational),
    Constant(BigRational),
    /// `e ↦ 2e - centre`.
    Quadratic(BigRational),
}

struct Region {
    lo: Option<BigRational>,
    hi: Option<BigRational>,
    branch: Branch,
}

enum Jump {
    Stay,
    ToZero,
    ToInfinity,
    To(BigRational),
}

fn ceil_div(n: &BigRational, d: &BigRational) -> BigInt {
    let q = n / d;
    q.numer().div_ceil(q.denom())
}

const MAX_MACRO_STEPS: usize = 100_000;

impl PiecewiseSpec {
    fn exps(&self) -> (Option<BigRational>, BigRational, BigRational) {
        let a = self.alpha.exponent().cloned();
        let b = self.beta.exponent().cloned().expect("β is finite and nonzero");
        let k = self.c_norm.exponent().cloned().expect("|c| is finite and nonzero");
        (a, b, k)
    }

    fn region(&self, e: &BigRational) -> Region {
        let (a, b, k) = self.exps();
        match self.shape {
            Shape::ZeroInside => match a {
                Some(a) if *e < a => Region { lo: None, hi: Some(a.clone()), branch: Branch::Linear(&a - &b - &k) },
                a if *e < b => Region { lo: a, hi: Some(b.clone()), branch: Branch::Quadratic(&b + &k) },
                _ => Region { lo: Some(b), hi: None, branch: Branch::Linear(-k) },
            },
            Shape::PoleInside => {
                let a = a.expect("α > β > 0");
                if *e < b {
                    Region { lo: None, hi: Some(b.clone()), branch: Branch::Linear(&a - &b - &k) }
                } else if *e < a {
                    Region { lo: Some(b), hi: Some(a.clone()), branch: Branch::Constant(&a - &k) }
                } else {
                    Region { lo: Some(a), hi: None, branch: Branch::Linear(-k) }
                }
            }
            Shape::Coincident => {
                let a = a.expect("α > 0");
                if *e < a {
                    Region { lo: None, hi: Some(a), branch: Branch::Linear(-k) }
                } else {
                    Region { lo: Some(a), hi: None, branch: Branch::Linear(-k) }
                }
            }
        }
    }

    fn jump(&self, e: &BigRational) -> Jump {
        let Region { lo, hi, branch } = self.region(e);
        match branch {
            Branch::Linear(s) if s.is_zero() => Jump::Stay,
            Branch::Linear(s) if s.is_negative() => match lo {
                None => Jump::ToZero,
                Some(lo) => {
                    let m = ceil_div(&(e - &lo), &-&s);
                    Jump::To(e + s * BigRational::from(m))
                }
            },
            Branch::Linear(s) => match hi {
                None => Jump::ToInfinity,
                Some(hi) => {
                    let m = ceil_div(&(&hi - e), &s);
                    Jump::To(e + s * BigRational::from(m))
                }
            },
            Branch::Constant(v) => {
                if &v == e {
                    Jump::Stay
                } else {
                    Jump::To(v)
                }
            }
            Branch::Quadratic(centre) => {
                let two = BigRational::from(BigInt::from(2));
                let mut x = e.clone();
                if x == centre {
                    return Jump::Stay;
                }
                if x > centre {
                    let hi = hi.expect("quadratic branch is bounded above");
                    while x < hi {
                        x = &two * &x - &centre;
                    }
                    Jump::To(x)
                } else {
                    let Some(lo) = lo else {
                        return Jump::ToZero;
                    };
                    while x > lo {
                        x = &two * &x - &centre;
                    }
                    Jump::To(x)
                }
            }
        }
    }

    fn settle(start: &Radius, at: Radius) -> LimitVerdict {
        if &at == start {
            LimitVerdict::Fixed(at)
        } else {
            LimitVerdict::ConvergesTo(at)
        }
    }

    /// Exact limit of the orbit of `r` under the map with fixed star values.
    pub fn classify_limit(&self, r: &Radius) -> Result<LimitVerdict, RadiusError> {
        if self.is_deferred() {
            let bp = if self.alpha_star.is_none() { Breakpoint::ZeroRadius } else { Breakpoint::PoleRadius };
            return Err(RadiusError::StarValueRequired(bp));
        }
        let mut cur = r.clone();
        let mut visited: Vec<Radius> = Vec::new();
        for _ in 0..MAX_MACRO_STEPS {
            let e = match &cur {
                Radius::Zero => return Ok(Self::settle(r, Radius::Zero)),
                Radius::Infinity => return Ok(LimitVerdict::DivergesToInfinity),
                Radius::Finite(e) => e.clone(),
            };
            if self.breakpoint(&cur).is_some() {
                if visited.contains(&cur) {
                    return self.cycle_through(&cur);
                }
                visited.push(cur.clone());
                let next = self.step(&cur)?;
                if next == cur {
                    return Ok(Self::settle(r, cur));
                }
                cur = next;
                continue;
            }
            match self.jump(&e) {
                Jump::Stay => return Ok(Self::settle(r, cur)),
                Jump::ToZero => return Ok(LimitVerdict::ConvergesTo(Radius::Zero)),
                Jump::ToInfinity => return Ok(LimitVerdict::DivergesToInfinity),
                Jump::To(x) => cur = Radius::Finite(x),
            }
        }
        Err(RadiusError::Unresolved)
    }

    fn cycle_through(&self, head: &Radius) -> Result<LimitVerdict, RadiusError> {
        let mut cycle = vec![head.clone()];
        let mut cur = self.step(head)?;
        while &cur != head {
            if cycle.len() > MAX_MACRO_STEPS {
                return Err(RadiusError::Unresolved);
            }
            cycle.push(cur.clone());
            cur = self.step(&cur)?;
        }
        let k = cycle.len();
        debug_assert!(k >= 2, "period-one points are settled before cycle detection");
        Ok(LimitVerdict::EntersCycle { cycle, k })
    }

    /// Naive iteration until a radius repeats.
    pub fn find_cycle(&self, start: &Radius, max_steps: usize) -> Result<CycleSearch, RadiusError> {
        let mut seen: HashMap<Radius, usize> = HashMap::new();
        let mut seq = vec![start.clone()];
        seen.insert(start.clone(), 0);
        for n in 0..max_steps {
            let next = self.step(&seq[n])?;
            if let Some(&i) = seen.get(&next) {
                let cycle = seq[i..].to_vec();
                return Ok(if cycle.len() == 1 {
                    CycleSearch::Fixed(next)
                } else {
                    CycleSearch::Cycle { k: cycle.len(), cycle, entry: i }
                });
            }
            seen.insert(next.clone(), n + 1);
            seq.push(next);
        }
        Ok(CycleSearch::NoCycleWithinBound)
    }

    /// Parameter regime, for specs with fixed star values.
    pub fn case_label(&self) -> Result<SpecCase, RadiusError> {
        use std::cmp::Ordering::*;
        if self.is_deferred() {
            return Err(RadiusError::StarValueRequired(Breakpoint::ZeroRadius));
        }
        let one = Radius::one();
        let c = &self.c_norm;
        let scale = c.cmp(&one);
        let cb = c * &self.beta;
        let ca = c * &self.alpha;
        let a_star = self.alpha_star.as_ref().expect("fixed");
        Ok(match self.shape {
            Shape::ZeroInside => {
                let b_star = self.beta_star.as_ref().expect("fixed");
                match scale {
                    Equal => SpecCase::ZeroInsideIsometric,
                    Greater if *b_star == cb => SpecCase::ZeroInsideExpandingPinned,
                    Greater => SpecCase::ZeroInsideExpandingFree,
                    Less => match self.alpha.cmp(&cb) {
                        Less => SpecCase::ZeroInsideContractingGap,
                        Equal if *a_star == ca => SpecCase::ZeroInsideContractingFlatPinned,
                        Equal => SpecCase::ZeroInsideContractingFlatFree,
                        Greater => match a_star.cmp(&ca) {
                            Equal => SpecCase::ZeroInsideContractingSteepPinned,
                            Greater => SpecCase::ZeroInsideContractingSteepHigh,
                            Less => SpecCase::ZeroInsideContractingSteepLow,
                        },
                    },
                }
            }
            Shape::PoleInside => {
                let b_star = self.beta_star.as_ref().expect("fixed");
                match scale {
                    Equal if *a_star == self.alpha => SpecCase::PoleInsideIsometricPinned,
                    Equal => SpecCase::PoleInsideIsometricFree,
                    Less if *a_star == ca => SpecCase::PoleInsideContractingPinned,
                    Less => SpecCase::PoleInsideContractingFree,
                    Greater => match self.alpha.cmp(&cb) {
                        Greater => SpecCase::PoleInsideExpandingSteep,
                        Equal => SpecCase::PoleInsideExpandingBalanced,
                        Less if *b_star == cb => SpecCase::PoleInsideExpandingShallowPinned,
                        Less => SpecCase::PoleInsideExpandingShallowFree,
                    },
                }
            }
            Shape::Coincident => {
                let pinned = *a_star == ca;
                match (scale, pinned) {
                    (Equal, true) => SpecCase::CoincidentIsometricPinned,
                    (Equal, false) => SpecCase::CoincidentIsometricFree,
                    (Greater, true) => SpecCase::CoincidentExpandingPinned,
                    (Greater, false) => SpecCase::CoincidentExpandingFree,
                    (Less, true) => SpecCase::CoincidentContractingPinned,
                    (Less, false) => SpecCase::CoincidentContractingFree,
                }
            }
        })
    }

    /// All radii with `step(r) = r`, as a union of points and open intervals.
    pub fn fixed_point_set(&self) -> Result<FixedSet, RadiusError> {
        use std::cmp::Ordering::*;
        if self.is_deferred() {
            return Err(RadiusError::StarValueRequired(Breakpoint::ZeroRadius));
        }
        let one = Radius::one();
        let c = &self.c_norm;
        let (alpha, beta) = (&self.alpha, &self.beta);
        let a_star = self.alpha_star.as_ref().expect("fixed");
        let b_star = self.beta_star.as_ref();
        let cb = c * beta;
        let ca = c * alpha;
        let mut terms = vec![SetTerm::Point(Radius::Zero)];
        let mut push_if = |cond: bool, t: SetTerm| {
            if cond {
                terms.push(t)
            }
        };
        match (self.shape, c.cmp(&one)) {
            (Shape::ZeroInside, Equal) => {
                push_if(true, SetTerm::Open { lo: beta.clone(), hi: Radius::Infinity });
                push_if(b_star == Some(beta), SetTerm::Point(beta.clone()));
            }
            (Shape::ZeroInside, Less) => {
                push_if(*alpha == cb && !alpha.is_zero(), SetTerm::Open { lo: Radius::Zero, hi: alpha.clone() });
                push_if(*a_star == ca && !alpha.is_zero(), SetTerm::Point(alpha.clone()));
                push_if(*alpha < cb, SetTerm::Point(cb.clone()));
            }
            (Shape::ZeroInside, Greater) => {
                push_if(b_star == Some(&cb), SetTerm::Point(beta.clone()));
            }
            (Shape::PoleInside, Equal) => {
                push_if(true, SetTerm::Open { lo: alpha.clone(), hi: Radius::Infinity });
                push_if(a_star == alpha, SetTerm::Point(alpha.clone()));
            }
            (Shape::PoleInside, Less) => {
                push_if(*a_star == ca, SetTerm::Point(alpha.clone()));
            }
            (Shape::PoleInside, Greater) => {
                push_if(*alpha == cb, SetTerm::Open { lo: Radius::Zero, hi: beta.clone() });
                push_if(*alpha > cb, SetTerm::Point(alpha / c));
                push_if(b_star == Some(&cb), SetTerm::Point(beta.clone()));
            }
            (Shape::Coincident, Equal) => {
                push_if(true, SetTerm::Open { lo: Radius::Zero, hi: alpha.clone() });
                push_if(true, SetTerm::Open { lo: alpha.clone(), hi: Radius::Infinity });
                push_if(a_star == alpha, SetTerm::Point(alpha.clone()));
            }
            (Shape::Coincident, _) => {
                push_if(*a_star == ca, SetTerm::Point(alpha.clone()));
            }
        }
        for t in &terms {
            for r in sample_term(t) {
                assert_eq!(self.step(&r)?, r, "fixed-point set member {r} is not fixed");
            }
        }
        Ok(FixedSet { terms })
    }
}

/// A few radii inside a set term.
pub(crate) fn sample_term(t: &SetTerm) -> Vec<Radius> {
    match t {
        SetTerm::Point(r) => vec![r.clone()],
        SetTerm::Open { lo, hi } => {
            let half = BigRational::new(1.into(), 2.into());
            let pick = |lo: &Radius, hi: &Radius| -> Vec<Radius> {
                match (lo, hi) {
                    (Radius::Finite(a), Radius::Finite(b)) => {
                        let w = b - a;
                        vec![Radius::Finite(a + &w * &half), Radius::Finite(a + &w * BigRational::new(1.into(), 7.into()))]
                    }
                    (Radius::Zero, Radius::Finite(b)) => vec![Radius::Finite(b - &half), Radius::Finite(b - BigRational::from(BigInt::from(9)))],
                    (Radius::Finite(a), Radius::Infinity) => vec![Radius::Finite(a + &half), Radius::Finite(a + BigRational::from(BigInt::from(9)))],
                    _ => vec![Radius::one()],
                }
            };
            pick(lo, hi)
        }
    }
}

/// Limit read off `steps` naive iterations, or `None` when inconclusive.
///
/// A radius at or below `p^-threshold` counts as converging to zero, and one at
/// or above `p^threshold` as diverging.
pub fn brute_force_verdict(spec: &PiecewiseSpec, r: &Radius, steps: usize, threshold: i64) -> Result<Option<LimitVerdict>, RadiusError> {
    let t = BigRational::from(BigInt::from(threshold));
    let mut seq = vec![r.clone()];
    let mut seen: HashMap<Radius, usize> = HashMap::new();
    for n in 0..steps {
        let cur = seq[n].clone();
        match &cur {
            Radius::Zero => {
                return Ok(Some(if n == 0 { LimitVerdict::Fixed(cur) } else { LimitVerdict::ConvergesTo(cur) }));
            }
            Radius::Infinity => return Ok(Some(LimitVerdict::DivergesToInfinity)),
            Radius::Finite(e) => {
                if *e <= -&t {
                    return Ok(Some(LimitVerdict::ConvergesTo(Radius::Zero)));
                }
                if *e >= t {
                    return Ok(Some(LimitVerdict::DivergesToInfinity));
                }
            }
        }
        let next = spec.step(&cur)?;
        if next == cur {
            return Ok(Some(if n == 0 { LimitVerdict::Fixed(cur) } else { LimitVerdict::ConvergesTo(cur) }));
        }
        seen.insert(cur, n);
        if let Some(&i) = seen.get(&next) {
            let cycle = seq[i..=n].to_vec();
            return Ok(Some(LimitVerdict::EntersCycle { k: cycle.len(), cycle }));
        }
        seq.push(next);
    }
    Ok(None)
}

/// Same cycle up to rotation.
pub fn same_cycle(a: &[Radius], b: &[Radius]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..b.len()).any(|s| a.iter().enumerate().all(|(i, x)| x == &b[(i + s) % b.len()]))
}

impl LimitVerdict {
    /// The limiting radius for convergent and fixed verdicts.
    pub fn limit_radius(&self) -> Option<Radius> {
        match self {
            LimitVerdict::ConvergesTo(r) | LimitVerdict::Fixed(r) => Some(r.clone()),
            _ => None,
        }
    }

    /// Equality, with cycles compared up to rotation.
    pub fn agrees_with(&self, other: &LimitVerdict) -> bool {
        match (self, other) {
            (LimitVerdict::EntersCycle { cycle: a, .. }, LimitVerdict::EntersCycle { cycle: b, .. }) => same_cycle(a, b),
            (a, b) => a == b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(e: i64) -> Radius {
        Radius::exp(e)
    }
    fn h(n: i64) -> Radius {
        Radius::exp_ratio(n, 2)
    }

    #[test]
    fn documented_limits() {
        let s = PiecewiseSpec::zero_inside(r(-1), r(0), r(0), Some((r(-2), r(0)))).unwrap();
        assert_eq!(s.classify_limit(&r(-2)).unwrap(), LimitVerdict::ConvergesTo(Radius::Zero));
        assert_eq!(s.classify_limit(&r(3)).unwrap(), LimitVerdict::Fixed(r(3)));
        assert_eq!(s.classify_limit(&r(0)).unwrap(), LimitVerdict::Fixed(r(0)));
        // pole inside, |c| > 1, α > |c|β: everything positive goes to α/|c|
        let s = PiecewiseSpec::pole_inside(r(3), r(0), r(1), Some((r(2), r(4)))).unwrap();
        for e in [-5, 0, 1, 2, 3, 7] {
            assert_eq!(s.classify_limit(&r(e)).unwrap().limit_radius(), Some(r(2)), "e = {e}");
        }
        // coincident, |c| < 1, |c|α ≠ α̂
        let s = PiecewiseSpec::coincident(r(0), r(-1), Some(r(-3))).unwrap();
        assert_eq!(s.classify_limit(&r(2)).unwrap(), LimitVerdict::DivergesToInfinity);
        // α ↦ α̂/|c| = p^-2, then the isometric shift climbs back onto α
        match s.classify_limit(&r(0)).unwrap() {
            LimitVerdict::EntersCycle { cycle, k } => {
                assert_eq!(k, 3);
                assert!(same_cycle(&cycle, &[r(0), r(-2), r(-1)]));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn cycle_on_pole_inside_isometric() {
        // α = p^2, β = p^0, α' = p^-1: α → α' → (α/β)α' = p^1 → α (constant branch)
        let s = PiecewiseSpec::pole_inside(r(2), r(0), r(0), Some((r(-1), r(3)))).unwrap();
        match s.classify_limit(&r(2)).unwrap() {
            LimitVerdict::EntersCycle { cycle, k } => {
                assert!(k >= 2);
                assert!(same_cycle(&cycle, &[r(2), r(-1), r(1)]));
            }
            v => panic!("{v:?}"),
        }
        match s.find_cycle(&r(2), 50).unwrap() {
            CycleSearch::Cycle { cycle, k, .. } => {
                let mut x = cycle[0].clone();
                for _ in 0..k {
                    x = s.step(&x).unwrap();
                }
                assert_eq!(x, cycle[0]);
            }
            v => panic!("{v:?}"),
        }
        let c = PiecewiseSpec::coincident(r(0), r(0), Some(r(0))).unwrap();
        assert_eq!(c.find_cycle(&r(0), 10).unwrap(), CycleSearch::Fixed(r(0)));
    }

    #[test]
    fn fixed_sets() {
        let s = PiecewiseSpec::zero_inside(r(-1), r(0), r(0), Some((r(-2), r(0)))).unwrap();
        let f = s.fixed_point_set().unwrap();
        assert!(f.contains(&Radius::Zero) && f.contains(&r(0)) && f.contains(&r(4)));
        assert!(!f.contains(&r(-1)));
        let c = PiecewiseSpec::coincident(r(-1), r(0), Some(r(-1))).unwrap();
        let f = c.fixed_point_set().unwrap();
        for e in [-9, -1, 0, 5] {
            assert!(f.contains(&r(e)));
        }
        let g = PiecewiseSpec::pole_inside(r(3), r(0), r(1), Some((r(2), r(4)))).unwrap();
        assert_eq!(g.fixed_point_set().unwrap().terms, vec![SetTerm::Point(Radius::Zero), SetTerm::Point(r(2))]);
    }

    #[test]
    fn exhaustive_small_grid_matches_brute_force() {
        let exps: Vec<Radius> = (-4..=4).map(h).collect();
        let mut checked = 0;
        for a in &exps {
            for b in &exps {
                for c in [h(-2), h(-1), h(0), h(1), h(2)] {
                    let Ok(base) = PiecewiseSpec::from_radii(a.clone(), b.clone(), c.clone()) else { continue };
                    for sa in [h(-9), h(-4), h(0), h(3), h(6)] {
                        for sb in [h(-2), h(2), h(5), h(8)] {
                            let Ok(s) = base.with_stars(sa.clone(), Some(sb.clone())) else { continue };
                            for start in exps.iter().chain([Radius::Zero].iter()) {
                                let exact = s.classify_limit(start).unwrap();
                                if let Some(naive) = brute_force_verdict(&s, start, 200, 30).unwrap() {
                                    assert!(exact.agrees_with(&naive), "{s:?} r={start}: {exact:?} vs {naive:?}");
                                    checked += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 5_000, "{checked}");
    }
}
