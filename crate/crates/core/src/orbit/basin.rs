//! Seeded sampling of spheres around the fixed point of a `c = 1` map.

use super::{exceptional_probe, iterate, Backend, Event, ExceptionalVerdict, IterateOptions};
use crate::field::{ExactElement, Prime, Radius};
use crate::map::{CaseTag, MapError, MapParams};
use crate::radius::{C1Branch, C1Model};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct BasinOptions {
    /// Radius exponents `e` of the spheres `|x - x₀| = p^e`.
    pub radius_exps: Vec<i64>,
    pub samples: usize,
    pub steps: usize,
    /// Converged once the radius exponent is at or below this.
    pub converge_exp: i64,
    pub seed: u64,
    pub precision: u32,
}

impl Default for BasinOptions {
    fn default() -> Self {
        BasinOptions { radius_exps: vec![-1, -2], samples: 20, steps: 25, converge_exp: -20, seed: 0, precision: 40 }
    }
}

/// What an orbit starting on the critical sphere did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalOutcome {
    StaysOnSphere,
    /// Left for a larger sphere, which it then keeps.
    JumpsTo(Radius),
    /// Anything else; breaks the two-branch picture.
    Other(Vec<Radius>),
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereSummary {
    pub radius: Radius,
    pub branch: C1Branch,
    pub sampled: usize,
    /// Points skipped because their orbit hits the pole.
    pub exceptional: usize,
    pub converged: usize,
    /// Orbits whose radius ever differed from the starting one.
    pub invariance_violations: usize,
    pub critical_outcomes: Vec<CriticalOutcome>,
    /// Last radius exponent of each orbit, as text, for auditing the thresholds.
    pub final_exponents: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasinReport {
    pub params: String,
    pub seed: u64,
    pub fixed_point: String,
    pub delta: Radius,
    pub multiplier_norm: Radius,
    pub spheres: Vec<SphereSummary>,
}

/// A point at distance exactly `p^e` from the rational `anchor`: `anchor + u·p^(-e)`
/// with `u` a random unit.
pub fn sphere_point(anchor: &BigRational, p: Prime, e: i64, rng: &mut impl Rng) -> ExactElement {
    let pp = p.get() as i64;
    let mut u: i64 = rng.gen_range(1..pp.pow(3));
    while u % pp == 0 {
        u = rng.gen_range(1..pp.pow(3));
    }
    if rng.gen_bool(0.5) {
        u = -u;
    }
    let scale = BigRational::from(BigInt::from(pp)).pow(-e as i32);
    let x = anchor + BigRational::from(BigInt::from(u)) * scale;
    let x = ExactElement::rational(x);
    let got = x.try_sub(&ExactElement::rational(anchor.clone())).expect("rational").norm(p);
    assert_eq!(got, Radius::exp(e), "sampled point is off the sphere");
    x
}

fn sample_rng(seed: u64, sphere: usize, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((sphere as u64) << 32) | sample as u64);
    rng
}

struct Sample {
    exceptional: bool,
    converged: bool,
    log: Vec<Radius>,
}

/// Samples points on each sphere around the fixed point, iterates them and
/// summarises convergence, invariance and the critical-sphere branch.
pub fn basin_probe(params: &MapParams, opts: &BasinOptions) -> Result<BasinReport, MapError> {
    params.expect_case(CaseTag::UniqueFixed)?;
    let fp = params.fixed_points()?.points.remove(0);
    let x0 = fp.point.as_rational().expect("unique fixed point is rational").clone();
    let p = params.p();
    let model = C1Model::new(fp.local_type.into(), fp.pole_radius.clone(), fp.multiplier_norm.clone())
        .map_err(|e| MapError::Invalid(e.to_string()))?;
    let iter_opts = IterateOptions { backend: Backend::Anchored(opts.precision), converge_exp: opts.converge_exp, ..Default::default() };
    let mut spheres = Vec::new();
    for (si, &e) in opts.radius_exps.iter().enumerate() {
        let radius = Radius::exp(e);
        let samples: Vec<Sample> = (0..opts.samples)
            .into_par_iter()
            .map(|k| -> Result<Sample, MapError> {
                let mut rng = sample_rng(opts.seed, si, k);
                let x = sphere_point(&x0, p, e, &mut rng);
                if matches!(exceptional_probe(params, &x, opts.steps)?, ExceptionalVerdict::InSet { .. }) {
                    return Ok(Sample { exceptional: true, converged: false, log: Vec::new() });
                }
                let t = iterate(params, &x, opts.steps, &iter_opts)?;
                let converged = t.has_event(|ev| matches!(ev, Event::ConvergedTo { .. }));
                Ok(Sample { exceptional: false, converged, log: t.radius_logs[0].clone() })
            })
            .collect::<Result<_, _>>()?;
        let live: Vec<&Sample> = samples.iter().filter(|s| !s.exceptional).collect();
        let critical_outcomes = if radius == model.delta {
            live.iter()
                .map(|s| {
                    let moved: Vec<&Radius> = s.log.iter().filter(|r| **r != radius).collect();
                    match moved.first() {
                        None => CriticalOutcome::StaysOnSphere,
                        Some(mu) if **mu > radius && moved.iter().all(|r| r == mu) => CriticalOutcome::JumpsTo((*mu).clone()),
                        _ => CriticalOutcome::Other(s.log.clone()),
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        spheres.push(SphereSummary {
            branch: model.branch(&radius),
            sampled: samples.len(),
            exceptional: samples.len() - live.len(),
            converged: live.iter().filter(|s| s.converged).count(),
            invariance_violations: live.iter().filter(|s| s.log.iter().any(|r| *r != radius)).count(),
            critical_outcomes,
            final_exponents: live.iter().map(|s| s.log.last().map_or("none".into(), |r| r.to_string())).collect(),
            radius,
        });
    }
    Ok(BasinReport {
        params: params.to_string(),
        seed: opts.seed,
        fixed_point: fp.point.to_string(),
        delta: model.delta.clone(),
        multiplier_norm: model.q.clone(),
        spheres,
    })
}
