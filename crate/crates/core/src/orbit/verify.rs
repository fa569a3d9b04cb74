//! Step-by-step comparison of an orbit's radius log with the radius dynamics.
//!
//! Off the breakpoints the next radius is predicted from the current one
//! alone. On a breakpoint the star value is read off the orbit point itself
//! as `r·|γ + A|/|γ + B|` and checked against its admissible range.

use super::{iterate, nearest_anchor, Backend, Event, IterateOptions, Trajectory};
use crate::field::{ExactElement, Radius};
use crate::map::{CaseTag, MapError, MapParams};
use crate::radius::{nofix_spec, nofix_verdict, same_cycle, Breakpoint, C1Model, Constraint, LimitVerdict, PiecewiseSpec, Regime, Shape, SpecCase};
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub steps: usize,
    pub iterate: IterateOptions,
    /// Test mode: perturb the prediction for this step so the check must fail.
    pub corrupt_step: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { steps: 50, iterate: IterateOptions::default(), corrupt_step: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    /// The radius checked is the one after `step` applications of `f`.
    pub step: usize,
    pub anchor: usize,
    pub observed: Radius,
    pub predicted: Constraint,
    /// Star value read off the orbit when the previous radius was a breakpoint.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<Radius>,
    pub matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub anchor: usize,
    pub point: String,
    pub shape: Shape,
    pub alpha: Radius,
    pub beta: Radius,
    pub c_norm: Radius,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_label: Option<SpecCase>,
    pub start_radius: Radius,
    pub verdict: LimitVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub status: ClaimStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub params: String,
    pub case: CaseTag,
    pub x0: String,
    pub backend: Backend,
    pub steps_requested: usize,
    /// Steps actually iterated; less than requested after an early stop.
    pub steps_run: usize,
    pub models: Vec<ModelSummary>,
    pub records: Vec<StepRecord>,
    pub events: Vec<Event>,
    pub claims: Vec<ClaimCheck>,
    pub first_divergence: Option<usize>,
    pub passed: bool,
    pub notes: Vec<String>,
}

/// One chain of anchors: `anchor_at(n)` is the anchor the radius at step `n` is measured from.
struct Chain {
    spec: PiecewiseSpec,
    start: usize,
    alternating: bool,
}

impl Chain {
    fn anchor_at(&self, n: usize) -> usize {
        if self.alternating {
            (self.start + n) % 2
        } else {
            self.start
        }
    }

    fn log(&self, t: &Trajectory) -> Vec<Radius> {
        (0..t.len()).map(|n| t.radius(self.anchor_at(n), n).clone()).collect()
    }
}

fn claim(claim: &str, status: ClaimStatus, detail: String) -> ClaimCheck {
    ClaimCheck { claim: claim.to_string(), status, detail }
}

fn check_records(t: &Trajectory, chain: &Chain, p: u64, corrupt: Option<usize>) -> Vec<StepRecord> {
    let spec = &chain.spec;
    let mut out = Vec::new();
    for n in 0..t.len().saturating_sub(1) {
        let from = chain.anchor_at(n);
        let to = chain.anchor_at(n + 1);
        let r = t.radius(from, n);
        let observed = t.radius(to, n + 1).clone();
        let mut note = None;
        let mut star = None;
        let mut in_range = true;
        let mut predicted = match spec.breakpoint(r) {
            None => Constraint::Exact(spec.regular_step(r).expect("off breakpoints")),
            Some(bp) => match t.star(from, n) {
                Some(s) => {
                    if !spec.star_constraint(bp).admits(&s) {
                        in_range = false;
                        note = Some(format!("star value {s} outside {:?}", spec.star_constraint(bp)));
                    }
                    let v = &s / spec.c_norm();
                    star = Some(s);
                    Constraint::Exact(v)
                }
                None => {
                    note = Some("star value not resolved at the tracked precision".into());
                    spec.next_constraint(r)
                }
            },
        };
        if corrupt == Some(n + 1) {
            predicted = match predicted {
                Constraint::Exact(v) => Constraint::Exact(&v * &Radius::exp(1)),
                Constraint::AtMost(v) => Constraint::Exact(&v * &Radius::exp(1)),
                Constraint::AtLeast(v) => Constraint::Exact(&v / &Radius::exp(1)),
                Constraint::Free => Constraint::Exact(Radius::Infinity),
            };
            note = Some(format!("prediction corrupted on purpose (p = {p})"));
        }
        let matched = in_range && predicted.admits(&observed);
        out.push(StepRecord { step: n + 1, anchor: to, observed, predicted, star, matched, note });
    }
    out
}

/// First observed star value at each breakpoint, defaults at the extreme of the
/// admissible range for breakpoints the orbit never visits.
fn resolved_spec(spec: &PiecewiseSpec, records: &[StepRecord], log: &[Radius]) -> PiecewiseSpec {
    let seen = |bp: Breakpoint| {
        records.iter().zip(log).find(|(rec, r)| rec.star.is_some() && spec.breakpoint(r) == Some(bp)).and_then(|(rec, _)| rec.star.clone())
    };
    let (alpha, beta) = (spec.alpha().clone(), spec.beta().clone());
    let (da, db) = match spec.shape() {
        Shape::ZeroInside => (&alpha.square() / &beta, beta.clone()),
        Shape::PoleInside => (alpha.clone(), alpha.clone()),
        Shape::Coincident => (alpha.clone(), alpha.clone()),
    };
    let a = seen(Breakpoint::ZeroRadius).unwrap_or(da);
    let b = seen(Breakpoint::PoleRadius).unwrap_or(db);
    spec.with_stars(a.clone(), Some(b)).or_else(|_| spec.with_stars(a, None)).unwrap_or_else(|_| spec.clone())
}

fn verdict_claim(verdict: &LimitVerdict, log: &[Radius], spec: &PiecewiseSpec, t: &Trajectory, anchors: &[usize]) -> ClaimCheck {
    let first = &log[0];
    let last = log.last().expect("nonempty log");
    let converged = t.has_event(|e| matches!(e, Event::ConvergedTo { anchor, .. } if anchors.contains(anchor)));
    match verdict {
        LimitVerdict::Fixed(r) => {
            let bad = log.iter().position(|x| x != r);
            match bad {
                None => claim("sphere invariance", ClaimStatus::Holds, format!("radius {r} at all {} steps", log.len())),
                Some(n) => claim("sphere invariance", ClaimStatus::Fails, format!("radius {} at step {n}, expected {r}", log[n])),
            }
        }
        LimitVerdict::ConvergesTo(Radius::Zero) => {
            if converged || last.is_zero() {
                claim("convergence to the anchor", ClaimStatus::Holds, format!("final radius {last}"))
            } else if last < first {
                claim("convergence to the anchor", ClaimStatus::Inconclusive, format!("final radius {last}, threshold not reached"))
            } else {
                claim("convergence to the anchor", ClaimStatus::Fails, format!("radius went from {first} to {last}"))
            }
        }
        LimitVerdict::ConvergesTo(rho) => {
            let status = if last == rho { ClaimStatus::Holds } else { ClaimStatus::Inconclusive };
            claim("convergence to a sphere", status, format!("limit {rho}, final radius {last}"))
        }
        LimitVerdict::DivergesToInfinity => {
            if t.has_event(|e| matches!(e, Event::Escaped { .. })) {
                claim("escape", ClaimStatus::Holds, format!("final radius {last}"))
            } else if last > first {
                claim("escape", ClaimStatus::Inconclusive, format!("final radius {last}, threshold not reached"))
            } else {
                claim("escape", ClaimStatus::Fails, format!("radius went from {first} to {last}"))
            }
        }
        LimitVerdict::EntersCycle { cycle, k } => {
            let tail_ok = log.len() >= *k && same_cycle(&log[log.len() - k..], cycle);
            let status = if tail_ok { ClaimStatus::Holds } else { ClaimStatus::Inconclusive };
            claim("sphere cycle", status, format!("{k}-cycle {cycle:?}"))
        }
        LimitVerdict::LandsInSphereSet { bound, note } => {
            let hit = (0..log.len().saturating_sub(1)).find(|&n| spec.breakpoint(&log[n]).is_some());
            match hit {
                None => claim("orbit-dependent sphere", ClaimStatus::Inconclusive, format!("no breakpoint reached; {note}")),
                Some(n) => {
                    let nu = &log[n + 1];
                    let status = if bound.admits(nu) { ClaimStatus::Holds } else { ClaimStatus::Fails };
                    claim("orbit-dependent sphere", status, format!("observed radius {nu} after step {}, bound {bound:?}", n + 1))
                }
            }
        }
    }
}

/// Iterates `x0` and checks every radius against the radius dynamics of each anchor.
pub fn verify(params: &MapParams, x0: &ExactElement, opts: &VerifyOptions) -> Result<VerificationReport, MapError> {
    let t = iterate(params, x0, opts.steps, &opts.iterate)?;
    let p = params.p();
    let case = params.case();
    let mut report = VerificationReport {
        params: params.to_string(),
        case,
        x0: x0.to_string(),
        backend: opts.iterate.backend,
        steps_requested: opts.steps,
        steps_run: t.len().saturating_sub(1),
        models: Vec::new(),
        records: Vec::new(),
        events: t.events.clone(),
        claims: Vec::new(),
        first_divergence: None,
        passed: true,
        notes: Vec::new(),
    };
    if t.is_empty() {
        report.notes.push("x0 is the pole; nothing to verify".into());
        return Ok(report);
    }
    let mut chains = Vec::new();
    match case {
        CaseTag::Identity => {
            let all_equal = t.points.iter().all(|x| x == &t.points[0]);
            let status = if all_equal { ClaimStatus::Holds } else { ClaimStatus::Fails };
            report.claims.push(claim("identity map", status, format!("{} points", t.len())));
        }
        CaseTag::UniqueFixed | CaseTag::TwoFixed => {
            let fps = params.fixed_points()?;
            for (i, fp) in fps.points.iter().enumerate() {
                let spec = PiecewiseSpec::from_radii(fp.zero_radius.clone(), fp.pole_radius.clone(), params.c_norm())
                    .map_err(|e| MapError::Invalid(e.to_string()))?;
                chains.push((i, Chain { spec, start: i, alternating: false }));
            }
            if case == CaseTag::UniqueFixed && fps.points[0].local_type == crate::map::LocalType::Repelling {
                report.notes.push("exceptional set for the repeller taken as the pole preimages of this map".into());
            }
            if case == CaseTag::TwoFixed {
                report.notes.push("limits for radii beyond α_i are checked against the same fixed point x_i".into());
            }
        }
        CaseTag::NoFixed => {
            let cyc = params.two_cycle()?;
            let start = nearest_anchor(&t.anchors, x0, params)?;
            chains.push((start, Chain { spec: nofix_spec(&cyc.h, p), start, alternating: true }));
        }
    }
    for (i, chain) in &chains {
        let records = check_records(&t, chain, p.get(), opts.corrupt_step);
        let log = chain.log(&t);
        let start_radius = log[0].clone();
        let (verdict, regime, label, spec_used) = match case {
            CaseTag::UniqueFixed => {
                let fp = &params.fixed_points()?.points[0];
                let model = C1Model::new(fp.local_type.into(), fp.pole_radius.clone(), fp.multiplier_norm.clone())
                    .map_err(|e| MapError::Invalid(e.to_string()))?;
                (model.verdict(&start_radius), Some(model.regime), None, chain.spec.clone())
            }
            CaseTag::NoFixed => {
                let cyc = params.two_cycle()?;
                (nofix_verdict(&cyc.h, p, &start_radius), None, None, chain.spec.clone())
            }
            _ => {
                let resolved = resolved_spec(&chain.spec, &records, &log);
                let v = resolved.classify_limit(&start_radius).unwrap_or(LimitVerdict::LandsInSphereSet {
                    bound: Constraint::Free,
                    note: "limit not resolved within the search bound".into(),
                });
                (v, None, resolved.case_label().ok(), resolved)
            }
        };
        let anchors: Vec<usize> = if chain.alternating { vec![0, 1] } else { vec![*i] };
        report.claims.push(verdict_claim(&verdict, &log, &spec_used, &t, &anchors));
        if chain.alternating && start_radius < *chain.spec.beta() {
            let bad = (0..t.len()).find(|&n| {
                let k = chain.anchor_at(n);
                t.radius(k, n) >= t.radius(1 - k, n)
            });
            report.claims.push(match bad {
                None => claim("anchor alternation", ClaimStatus::Holds, format!("{} steps", t.len())),
                Some(n) => claim("anchor alternation", ClaimStatus::Fails, format!("step {n} is not nearer the expected cycle point")),
            });
        }
        report.models.push(ModelSummary {
            anchor: *i,
            point: t.anchors[*i].to_string(),
            shape: chain.spec.shape(),
            alpha: chain.spec.alpha().clone(),
            beta: chain.spec.beta().clone(),
            c_norm: chain.spec.c_norm().clone(),
            regime,
            case_label: label,
            start_radius,
            verdict,
        });
        report.records.extend(records);
    }
    report.records.sort_by_key(|r| (r.step, r.anchor));
    report.first_divergence = report.records.iter().find(|r| !r.matched).map(|r| r.step);
    report.passed = report.first_divergence.is_none() && report.claims.iter().all(|c| c.status != ClaimStatus::Fails);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::Backend;

    fn m(p: u64, a: &str, b: &str, c: &str, d: &str) -> MapParams {
        MapParams::parse(p, a, b, c, d).unwrap()
    }
    fn e(s: &str) -> ExactElement {
        ExactElement::parse(s).unwrap()
    }

    #[test]
    fn two_fixed_example_converges() {
        let f = m(3, "0", "0", "2", "1");
        let r = verify(&f, &e("9"), &VerifyOptions::default()).unwrap();
        assert!(r.passed, "{r:#?}");
        let zero = r.models.iter().find(|m| m.point == "0").unwrap();
        assert_eq!(zero.verdict, LimitVerdict::ConvergesTo(Radius::Zero));
        assert!(r.events.iter().any(|e| matches!(e, Event::ConvergedTo { .. })));
    }

    #[test]
    fn repeller_schedule() {
        let f = m(3, "0", "2", "1", "1");
        let r = verify(&f, &e("11"), &VerifyOptions { steps: 2, ..Default::default() }).unwrap();
        assert!(r.passed, "{r:#?}");
        let obs: Vec<_> = r.records.iter().map(|x| x.observed.clone()).collect();
        assert_eq!(obs, vec![Radius::exp(-1), Radius::exp(1)]);
        assert_eq!(r.records[1].star, Some(Radius::exp(1)));
    }

    #[test]
    fn cycle_alternation() {
        let f = m(5, "0", "-2", "1", "0");
        let opts = VerifyOptions { steps: 20, iterate: IterateOptions::with_backend(Backend::Anchored(30)), corrupt_step: None };
        let r = verify(&f, &e("6"), &opts).unwrap();
        assert!(r.passed, "{r:#?}");
        assert_eq!(r.records.len(), 20);
        assert!(r.records.iter().all(|x| x.observed == Radius::exp(-1)));
        let anchors: Vec<_> = r.records.iter().map(|x| x.anchor).collect();
        assert!(anchors.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn corrupted_prediction_fails() {
        let f = m(3, "0", "0", "2", "1");
        let opts = VerifyOptions { corrupt_step: Some(2), ..Default::default() };
        let r = verify(&f, &e("9"), &opts).unwrap();
        assert!(!r.passed);
        assert_eq!(r.first_divergence, Some(2));
    }
}
