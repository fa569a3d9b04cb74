//! Orbits `x_n = fⁿ(x₀)` and their distances to the fixed points or cycle points.
//!
//! Three backends:
//! - `Exact` iterates in ℚ or ℚ(√D). Heights roughly double per step, so a
//!   bit-size ceiling stops long runs with a `SizeCeiling` event.
//! - `Truncated(N)` iterates `f` directly on p-adic numbers carrying `N`
//!   significant digits.
//! - `Anchored(N)` iterates the deviation `γ = x - x_i` from the nearest anchor
//!   with `N` significant digits. Relative precision of `γ` does not decay as
//!   the orbit closes in, so radii stay exact on long convergent runs.

mod basin;
mod exceptional;
mod verify;

pub use basin::{basin_probe, sphere_point, BasinOptions, BasinReport, CriticalOutcome, SphereSummary};
pub use exceptional::{exceptional_probe, growth_constant, height, replay_certificate, ExceptionalTarget, ExceptionalVerdict};
pub use verify::{verify, ClaimCheck, ClaimStatus, ModelSummary, StepRecord, VerificationReport, VerifyOptions};

use crate::field::{ExactElement, FieldError, Radius, Scalar, TruncatedElement};
use crate::map::{DeviationConsts, MapError, MapParams};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Exact,
    Truncated(u32),
    Anchored(u32),
}

impl Backend {
    /// `exact`, `trunc` or `anchored`; the last two take `precision` digits.
    pub fn from_name(name: &str, precision: u32) -> Option<Backend> {
        match name {
            "exact" => Some(Backend::Exact),
            "trunc" | "truncated" => Some(Backend::Truncated(precision)),
            "anchored" => Some(Backend::Anchored(precision)),
            _ => None,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Truncated(n) => write!(f, "trunc({n})"),
            Backend::Anchored(n) => write!(f, "anchored({n})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct IterateOptions {
    pub backend: Backend,
    /// Exact backend stops once a coordinate needs more bits than this.
    pub size_ceiling_bits: u64,
    /// A radius `p^e` with `e` at or below this counts as converged.
    pub converge_exp: i64,
    /// `|x_n| = p^e` with `e` at or above this counts as escaped.
    pub escape_exp: i64,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions { backend: Backend::Exact, size_ceiling_bits: 16_384, converge_exp: -60, escape_exp: 60 }
    }
}

impl IterateOptions {
    pub fn with_backend(backend: Backend) -> Self {
        IterateOptions { backend, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// `x_step` is the pole; the orbit ends there.
    PoleHit { step: usize },
    ConvergedTo { anchor: usize, step: usize },
    Escaped { step: usize },
    /// The radius log to `anchor` ends in a cycle of spheres.
    SphereCycleDetected { anchor: usize, radii: Vec<Radius>, period: usize },
    /// `x_step` could not be told apart from an anchor or the pole at the tracked precision.
    PrecisionExhausted { step: usize },
    SizeCeiling { step: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitPoint {
    Exact(ExactElement),
    Truncated(TruncatedElement),
}

impl OrbitPoint {
    pub fn exact(&self) -> Option<&ExactElement> {
        match self {
            OrbitPoint::Exact(x) => Some(x),
            OrbitPoint::Truncated(_) => None,
        }
    }
}

impl fmt::Display for OrbitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitPoint::Exact(x) => write!(f, "{x}"),
            OrbitPoint::Truncated(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for OrbitPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `|γ + A|` and `|γ + B|` for the deviation `γ` out of one anchor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalFactors {
    pub zero_side: Radius,
    pub pole_side: Radius,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub backend: Backend,
    pub points: Vec<OrbitPoint>,
    /// Fixed points, or the two cycle points.
    #[serde(serialize_with = "serialize_display_vec")]
    pub anchors: Vec<ExactElement>,
    /// `radius_logs[i][n] = |x_n - anchors[i]|`.
    pub radius_logs: Vec<Vec<Radius>>,
    /// `factors[j][n]` for the deviation step out of `anchors[j]`; `None` when
    /// the tracked precision could not resolve it.
    pub factors: Vec<Vec<Option<LocalFactors>>>,
    pub events: Vec<Event>,
}

fn serialize_display_vec<S: Serializer, T: fmt::Display>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl Trajectory {
    /// Number of recorded points, `x_0` included.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self, anchor: usize, n: usize) -> &Radius {
        &self.radius_logs[anchor][n]
    }

    pub fn has_event(&self, pred: impl Fn(&Event) -> bool) -> bool {
        self.events.iter().any(pred)
    }

    /// The star value `r·|γ + A|/|γ + B|` at step `n` for the deviation out of `anchor`.
    pub fn star(&self, anchor: usize, n: usize) -> Option<Radius> {
        let f = self.factors.get(anchor)?.get(n)?.as_ref()?;
        Some(&(&self.radius_logs[anchor][n] * &f.zero_side) / &f.pole_side)
    }
}

/// Index of the anchor closest to `x` (first on ties).
pub fn nearest_anchor(anchors: &[ExactElement], x: &ExactElement, params: &MapParams) -> Result<usize, MapError> {
    let p = params.p();
    let mut best: Option<(usize, Radius)> = None;
    for (i, a) in anchors.iter().enumerate() {
        let r = x.try_sub(a)?.norm(p);
        if best.as_ref().is_none_or(|(_, b)| r < *b) {
            best = Some((i, r));
        }
    }
    Ok(best.map_or(0, |(i, _)| i))
}

struct Recorder {
    traj: Trajectory,
    opts: IterateOptions,
}

impl Recorder {
    fn new(backend: Backend, anchors: Vec<ExactElement>, devs: usize, opts: &IterateOptions) -> Self {
        let k = anchors.len();
        Recorder {
            traj: Trajectory {
                backend,
                points: Vec::new(),
                anchors,
                radius_logs: vec![Vec::new(); k],
                factors: vec![Vec::new(); devs],
                events: Vec::new(),
            },
            opts: opts.clone(),
        }
    }

    /// Records `x_step`; returns false when the orbit must stop here.
    fn record(&mut self, step: usize, point: OrbitPoint, radii: Vec<Radius>, factors: Vec<Option<LocalFactors>>, abs: Radius) -> bool {
        self.traj.points.push(point);
        for (log, r) in self.traj.radius_logs.iter_mut().zip(radii.iter()) {
            log.push(r.clone());
        }
        for (log, f) in self.traj.factors.iter_mut().zip(factors) {
            log.push(f);
        }
        let t = BigRational::from(BigInt::from(self.opts.converge_exp));
        if let Some(i) = radii.iter().position(|r| r.exp_at_most(&t)) {
            self.traj.events.push(Event::ConvergedTo { anchor: i, step });
            return false;
        }
        if abs.exp_at_least(&BigRational::from(BigInt::from(self.opts.escape_exp))) {
            self.traj.events.push(Event::Escaped { step });
            return false;
        }
        true
    }
}

fn factors_of<S: Scalar>(gamma: &S, k: &DeviationConsts<S>, p: crate::field::Prime) -> Option<LocalFactors> {
    let z = gamma.add(&k.zero_offset).ok()?.norm(p).ok()?;
    let b = gamma.add(&k.pole_offset).ok()?.norm(p).ok()?;
    Some(LocalFactors { zero_side: z, pole_side: b })
}

fn is_precision(e: &MapError) -> bool {
    matches!(e, MapError::Field(FieldError::PrecisionExhausted | FieldError::Indistinguishable))
}

fn run_direct<S: Scalar>(params: &MapParams, x0: &ExactElement, n: usize, rel: u32, opts: &IterateOptions, wrap: impl Fn(S) -> OrbitPoint) -> Result<Trajectory, MapError> {
    let p = params.p();
    let (anchors, devs) = params.deviations()?;
    let coeffs = params.coefficients::<S>(rel)?;
    let anchors_s = anchors.iter().map(|a| S::embed(a, p, rel)).collect::<Result<Vec<_>, _>>()?;
    let consts = devs.iter().map(|d| d.embed::<S>(p, rel)).collect::<Result<Vec<_>, _>>()?;
    let mut rec = Recorder::new(opts.backend, anchors, devs.len(), opts);
    let mut x = S::embed(x0, p, rel)?;
    for step in 0..=n {
        let measured = (|| -> Result<(Vec<Radius>, Vec<Option<LocalFactors>>, Radius), FieldError> {
            let mut radii = Vec::new();
            let mut gammas = Vec::new();
            for a in &anchors_s {
                let g = x.sub(a)?;
                radii.push(g.norm(p)?);
                gammas.push(g);
            }
            let factors = devs.iter().zip(&consts).map(|(d, k)| factors_of(&gammas[d.from], k, p)).collect();
            Ok((radii, factors, x.norm(p)?))
        })();
        let (radii, factors, abs) = match measured {
            Ok(m) => m,
            Err(FieldError::PrecisionExhausted | FieldError::Indistinguishable) => {
                rec.traj.events.push(Event::PrecisionExhausted { step });
                break;
            }
            Err(e) => return Err(e.into()),
        };
        if !rec.record(step, wrap(x.clone()), radii, factors, abs) || step == n {
            break;
        }
        if x.size_bits() > opts.size_ceiling_bits {
            rec.traj.events.push(Event::SizeCeiling { step });
            break;
        }
        match params.eval_in(&coeffs, &x) {
            Ok(y) => x = y,
            Err(MapError::PoleHit { .. }) => {
                rec.traj.events.push(Event::PoleHit { step });
                break;
            }
            Err(e) if is_precision(&e) => {
                rec.traj.events.push(Event::PrecisionExhausted { step: step + 1 });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(finish(rec, params))
}

fn run_anchored(params: &MapParams, x0: &ExactElement, n: usize, rel: u32, opts: &IterateOptions) -> Result<Trajectory, MapError> {
    let p = params.p();
    let (anchors, devs) = params.deviations()?;
    if anchors.is_empty() {
        return run_direct::<TruncatedElement>(params, x0, n, rel, opts, OrbitPoint::Truncated);
    }
    let embed = |x: &ExactElement| TruncatedElement::embed(x, p, rel);
    let consts = devs.iter().map(|d| d.embed::<TruncatedElement>(p, rel)).collect::<Result<Vec<_>, _>>()?;
    let anchors_t = anchors.iter().map(embed).collect::<Result<Vec<_>, _>>()?;
    // offsets[i][j] = anchors[i] - anchors[j]
    let offsets = anchors
        .iter()
        .map(|a| anchors.iter().map(|b| embed(&a.try_sub(b)?)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut cur = nearest_anchor(&anchors, x0, params)?;
    let mut gamma = embed(&x0.try_sub(&anchors[cur])?)?;
    if params.eval(x0).is_err() {
        // x0 is the pole
        let mut rec = Recorder::new(opts.backend, anchors, devs.len(), opts);
        rec.traj.events.push(Event::PoleHit { step: 0 });
        return Ok(finish(rec, params));
    }
    let mut rec = Recorder::new(opts.backend, anchors.clone(), devs.len(), opts);
    for step in 0..=n {
        let measured = (|| -> Result<(Vec<Radius>, Vec<Option<LocalFactors>>, Radius, TruncatedElement), FieldError> {
            let gammas = (0..anchors.len())
                .map(|j| if j == cur { Ok(gamma.clone()) } else { gamma.add(&offsets[cur][j]) })
                .collect::<Result<Vec<_>, _>>()?;
            let radii = gammas.iter().map(|g| g.norm()).collect::<Result<Vec<_>, _>>()?;
            let factors = devs.iter().zip(&consts).map(|(d, k)| factors_of(&gammas[d.from], k, p)).collect();
            let x = anchors_t[cur].add(&gamma)?;
            let abs = x.norm()?;
            Ok((radii, factors, abs, x))
        })();
        let (radii, factors, abs, x) = match measured {
            Ok(m) => m,
            Err(FieldError::PrecisionExhausted | FieldError::Indistinguishable) => {
                rec.traj.events.push(Event::PrecisionExhausted { step });
                break;
            }
            Err(e) => return Err(e.into()),
        };
        if !rec.record(step, OrbitPoint::Truncated(x), radii, factors, abs) || step == n {
            break;
        }
        match devs[cur].apply(&gamma, &consts[cur]) {
            Ok(g) => {
                gamma = g;
                cur = devs[cur].to;
            }
            Err(MapError::PoleHit { .. }) => {
                rec.traj.events.push(Event::PoleHit { step });
                break;
            }
            Err(e) if is_precision(&e) => {
                rec.traj.events.push(Event::PrecisionExhausted { step: step + 1 });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(finish(rec, params))
}

fn finish(mut rec: Recorder, params: &MapParams) -> Trajectory {
    use crate::map::CaseTag;
    if matches!(params.case(), CaseTag::UniqueFixed | CaseTag::TwoFixed) {
        for (i, log) in rec.traj.radius_logs.iter().enumerate() {
            if let Some((radii, period)) = tail_cycle(log) {
                rec.traj.events.push(Event::SphereCycleDetected { anchor: i, radii, period });
            }
        }
    }
    rec.traj
}

/// A non-constant cycle the log ends in, seen at least three times over.
pub(crate) fn tail_cycle(log: &[Radius]) -> Option<(Vec<Radius>, usize)> {
    for k in 2..=12 {
        if log.len() < 3 * k {
            break;
        }
        let tail = &log[log.len() - 3 * k..];
        let periodic = (k..tail.len()).all(|i| tail[i] == tail[i - k]);
        let constant = tail[..k].iter().all(|r| r == &tail[0]);
        if periodic && !constant {
            return Some((tail[..k].to_vec(), k));
        }
    }
    None
}

/// Iterates `n` steps from `x0`, stopping early on a pole hit, convergence,
/// escape, precision loss or the size ceiling.
pub fn iterate(params: &MapParams, x0: &ExactElement, n: usize, opts: &IterateOptions) -> Result<Trajectory, MapError> {
    match opts.backend {
        Backend::Exact => run_direct::<ExactElement>(params, x0, n, 0, opts, OrbitPoint::Exact),
        Backend::Truncated(rel) => run_direct::<TruncatedElement>(params, x0, n, rel, opts, OrbitPoint::Truncated),
        Backend::Anchored(rel) => run_anchored(params, x0, n, rel, opts),
    }
}

/// Whether a truncated value is consistent with an exact one: their difference
/// vanishes to the truncated value's tracked precision.
pub fn consistent(t: &TruncatedElement, x: &ExactElement) -> bool {
    let p = t.prime();
    let Some(abs) = t.abs_precision() else {
        return TruncatedElement::embed(x, p, 8).is_ok_and(|e| e == *t);
    };
    let v = match x.valuation(p) {
        crate::field::ExtValuation::Finite(v) => v.floor().to_integer().try_into().unwrap_or(0i64),
        crate::field::ExtValuation::Infinite => 0,
    };
    let rel = (abs - v + 8).clamp(8, 1 << 16) as u32;
    let Ok(e) = TruncatedElement::embed(x, p, rel) else { return false };
    match t.sub(&e) {
        Ok(d) => !matches!(Scalar::is_zero(&d), Ok(false)),
        Err(_) => false,
    }
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
    fn repeller_orbit_points() {
        let f = m(3, "0", "2", "1", "1");
        let t = iterate(&f, &e("11"), 2, &IterateOptions::default()).unwrap();
        let pts: Vec<_> = t.points.iter().map(|x| x.exact().unwrap().clone()).collect();
        assert_eq!(pts, vec![e("11"), e("41/4"), e("571/60")]);
        assert_eq!(t.radius_logs[0], vec![Radius::exp(-2), Radius::exp(-1), Radius::exp(1)]);
    }

    #[test]
    fn cycle_swap_and_attraction() {
        let f = m(5, "0", "-2", "1", "0");
        let t = iterate(&f, &e("6"), 1, &IterateOptions::default()).unwrap();
        assert_eq!(t.points[1].exact().unwrap(), &e("17/3"));
        let i1 = t.anchors.iter().position(|a| a == &e("1")).unwrap();
        assert_eq!(t.radius_logs[i1][0], Radius::exp(-1));
        assert_eq!(t.radius_logs[1 - i1][1], Radius::exp(-1));
        let g = m(3, "1", "1", "1", "0");
        let t = iterate(&g, &e("2"), 1, &IterateOptions::default()).unwrap();
        assert_eq!(t.points[1].exact().unwrap(), &e("7/2"));
        assert_eq!(t.radius_logs[0], vec![Radius::exp(-1), Radius::exp(-2)]);
    }

    #[test]
    fn backends_agree() {
        let f = m(3, "0", "2", "1", "1");
        let ex = iterate(&f, &e("11"), 6, &IterateOptions::default()).unwrap();
        for b in [Backend::Truncated(40), Backend::Anchored(40)] {
            let tr = iterate(&f, &e("11"), 6, &IterateOptions::with_backend(b)).unwrap();
            for n in 0..tr.len() {
                assert_eq!(tr.radius_logs[0][n], ex.radius_logs[0][n], "{b} step {n}");
                let OrbitPoint::Truncated(t) = &tr.points[n] else { panic!() };
                assert!(consistent(t, ex.points[n].exact().unwrap()), "{b} step {n}");
            }
        }
    }

    #[test]
    fn anchored_converges_where_exact_cannot() {
        let f = m(3, "1", "1", "1", "0");
        let t = iterate(&f, &e("2"), 25, &IterateOptions { backend: Backend::Anchored(20), converge_exp: -200, ..Default::default() }).unwrap();
        assert!(t.has_event(|ev| matches!(ev, Event::ConvergedTo { anchor: 0, .. })), "{:?}", t.events);
        let last = t.radius_logs[0].last().unwrap();
        assert!(last.exp_at_most(&BigRational::from(BigInt::from(-200))));
    }

    #[test]
    fn pole_and_precision_events() {
        let f = m(3, "0", "2", "1", "1");
        let t = iterate(&f, &e("-1"), 5, &IterateOptions::default()).unwrap();
        assert_eq!(t.events, vec![Event::PoleHit { step: 0 }]);
        let t = iterate(&f, &e("11"), 50, &IterateOptions::with_backend(Backend::Truncated(2))).unwrap();
        assert!(t.has_event(|ev| matches!(ev, Event::PrecisionExhausted { .. })), "{:?}", t.events);
        let id = m(3, "1", "0", "1", "1");
        let t = iterate(&id, &e("5"), 4, &IterateOptions::default()).unwrap();
        assert!(t.points.iter().all(|x| x.exact() == Some(&e("5"))));
    }
}
