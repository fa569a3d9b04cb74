use super::config::{render_exponent, Format, RunConfig};
use super::{Command, EXIT_INVALID, EXIT_MISMATCH, EXIT_OK, EXIT_POLE};
use crate::field::{ExactElement, Radius};
use crate::map::{CaseTag, LocalType, MapParams};
use crate::orbit::{
    basin_probe, exceptional_probe, iterate, replay_certificate, verify, Backend, BasinOptions, Event, ExceptionalVerdict, IterateOptions,
    VerificationReport, VerifyOptions,
};
use crate::radius::{Constraint, LimitVerdict};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::io::Write;

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

/// One output record: the JSON line and the matching CSV row.
struct Row {
    json: Value,
    csv: Vec<String>,
}

struct Report {
    header: Value,
    columns: &'static [&'static str],
    rows: Vec<Row>,
}

impl Report {
    fn new(command: Command, cfg: &RunConfig, extra: Value) -> Report {
        let mut header = json!({"record": "header", "command": command.name(), "seed": cfg.seed});
        if let (Value::Object(h), Value::Object(e)) = (&mut header, extra) {
            h.extend(e);
        }
        Report { header, columns: &[], rows: Vec::new() }
    }

    fn push(&mut self, json: Value, csv: Vec<String>) {
        self.rows.push(Row { json, csv });
    }

    fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                writeln!(out, "{}", self.header)?;
                for r in &self.rows {
                    writeln!(out, "{}", r.json)?;
                }
            }
            Format::Csv => {
                let mut line = String::from("#");
                if let Value::Object(h) = &self.header {
                    for (k, v) in h.iter().filter(|(k, _)| *k != "record") {
                        let v = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                        line.push_str(&format!(" {k}={v}"));
                    }
                }
                writeln!(out, "{line}")?;
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(self.columns)?;
                for r in &self.rows {
                    w.write_record(&r.csv)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn exp(r: &Radius) -> String {
    render_exponent(r)
}

fn constraint_text(c: &Constraint) -> String {
    match c {
        Constraint::Exact(r) => format!("={}", exp(r)),
        Constraint::AtMost(r) => format!("<={}", exp(r)),
        Constraint::AtLeast(r) => format!(">={}", exp(r)),
        Constraint::Free => "any".into(),
    }
}

fn verdict_text(v: &LimitVerdict) -> String {
    match v {
        LimitVerdict::ConvergesTo(r) => format!("converges_to {}", exp(r)),
        LimitVerdict::Fixed(r) => format!("fixed {}", exp(r)),
        LimitVerdict::EntersCycle { cycle, .. } => format!("cycle {}", cycle.iter().map(exp).collect::<Vec<_>>().join(";")),
        LimitVerdict::DivergesToInfinity => "diverges".into(),
        LimitVerdict::LandsInSphereSet { bound, .. } => format!("sphere {}", constraint_text(bound)),
    }
}

fn event_name(e: &Event) -> String {
    match e {
        Event::PoleHit { step } => format!("pole_hit@{step}"),
        Event::ConvergedTo { anchor, step } => format!("converged_to[{anchor}]@{step}"),
        Event::Escaped { step } => format!("escaped@{step}"),
        Event::SphereCycleDetected { anchor, period, .. } => format!("sphere_cycle[{anchor}]/{period}"),
        Event::PrecisionExhausted { step } => format!("precision_exhausted@{step}"),
        Event::SizeCeiling { step } => format!("size_ceiling@{step}"),
    }
}

fn local_type(t: LocalType) -> String {
    format!("{t:?}").to_lowercase()
}

fn params(cfg: &RunConfig) -> Result<MapParams, Box<dyn std::error::Error>> {
    let (p, a, b, c, d) = cfg.single_params()?;
    Ok(MapParams::parse(p, a, b, c, d)?)
}

fn start_point(cfg: &RunConfig) -> Result<ExactElement, Box<dyn std::error::Error>> {
    let x0 = cfg.x0.as_deref().ok_or("--x0 is required")?;
    Ok(ExactElement::parse(x0)?)
}

fn iterate_options(cfg: &RunConfig) -> IterateOptions {
    let backend = Backend::from_name(&cfg.backend, cfg.precision).unwrap_or(Backend::Exact);
    IterateOptions { converge_exp: -cfg.threshold_exp, escape_exp: cfg.threshold_exp, size_ceiling_bits: cfg.size_ceiling, ..IterateOptions::with_backend(backend) }
}

pub(super) fn dispatch(command: Command, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::Classify => classify(cfg, out),
        Command::Iterate => run_iterate(cfg, out, err),
        Command::Verify => run_verify(cfg, out, err),
        Command::Sweep => sweep(cfg, out),
        Command::Basin => basin(cfg, out),
        Command::Probe => probe(cfg, out),
    }
}

fn classify(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let f = params(cfg)?;
    let mut rep = Report::new(Command::Classify, cfg, json!({"params": f.to_string(), "case": f.case()}));
    rep.columns = &["case", "role", "point", "multiplier", "multiplier_norm_exp", "local_type", "zero_radius_exp", "pole_radius_exp"];
    let case = f.case().to_string();
    match f.case() {
        CaseTag::UniqueFixed | CaseTag::TwoFixed => {
            let fps = f.fixed_points()?;
            for (i, fp) in fps.points.iter().enumerate() {
                rep.push(
                    json!({
                        "record": "fixed_point", "index": i, "point": fp.point.to_string(),
                        "multiplier": fp.multiplier.to_string(), "multiplier_norm_exp": exp(&fp.multiplier_norm),
                        "local_type": local_type(fp.local_type), "zero_radius_exp": exp(&fp.zero_radius),
                        "pole_radius_exp": exp(&fp.pole_radius), "c_norm_exp": exp(&f.c_norm()),
                    }),
                    vec![
                        case.clone(),
                        format!("fixed_point[{i}]"),
                        fp.point.to_string(),
                        fp.multiplier.to_string(),
                        exp(&fp.multiplier_norm),
                        local_type(fp.local_type),
                        exp(&fp.zero_radius),
                        exp(&fp.pole_radius),
                    ],
                );
            }
        }
        CaseTag::NoFixed => {
            let cyc = f.two_cycle()?;
            rep.push(
                json!({
                    "record": "two_cycle", "points": [cyc.points[0].to_string(), cyc.points[1].to_string()],
                    "s": cyc.s.to_string(), "h_exp": exp(&cyc.h),
                    "multipliers": [cyc.multipliers[0].to_string(), cyc.multipliers[1].to_string()],
                    "cycle_multiplier": cyc.cycle_multiplier.to_string(),
                    "cycle_multiplier_norm_exp": exp(&cyc.cycle_multiplier_norm), "local_type": local_type(cyc.local_type),
                }),
                vec![
                    case.clone(),
                    "two_cycle".into(),
                    format!("{} ; {}", cyc.points[0], cyc.points[1]),
                    cyc.cycle_multiplier.to_string(),
                    exp(&cyc.cycle_multiplier_norm),
                    local_type(cyc.local_type),
                    exp(&cyc.h),
                    exp(&cyc.h),
                ],
            );
        }
        CaseTag::Identity => {
            rep.push(
                json!({"record": "identity", "note": "f(x) = x off the pole"}),
                vec![case, "identity".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new()],
            );
        }
    }
    rep.write(cfg.format, out)?;
    Ok(EXIT_OK)
}

fn run_iterate(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let f = params(cfg)?;
    let x0 = start_point(cfg)?;
    let opts = iterate_options(cfg);
    let t = iterate(&f, &x0, cfg.steps, &opts)?;
    let mut rep = Report::new(
        Command::Iterate,
        cfg,
        json!({"params": f.to_string(), "x0": x0.to_string(), "backend": opts.backend.to_string(), "steps": cfg.steps,
               "anchors": t.anchors.iter().map(|a| a.to_string()).collect::<Vec<_>>()}),
    );
    rep.columns = &["n", "point", "radius_exps", "events"];
    for n in 0..t.len() {
        let radii: Vec<String> = t.radius_logs.iter().map(|log| exp(&log[n])).collect();
        let events: Vec<String> = t.events.iter().filter(|e| event_step(e) == Some(n)).map(event_name).collect();
        rep.push(
            json!({"record": "step", "n": n, "point": t.points[n].to_string(), "radius_exps": radii, "events": events}),
            vec![n.to_string(), t.points[n].to_string(), radii.join(";"), events.join(";")],
        );
    }
    let all: Vec<String> = t.events.iter().map(event_name).collect();
    rep.push(json!({"record": "end", "steps_run": t.len().saturating_sub(1), "events": t.events}), vec![
        "end".into(),
        String::new(),
        String::new(),
        all.join(";"),
    ]);
    rep.write(cfg.format, out)?;
    if t.events.contains(&Event::PoleHit { step: 0 }) {
        writeln!(err, "x0 is the pole of {f}")?;
        return Ok(EXIT_POLE);
    }
    Ok(EXIT_OK)
}

fn event_step(e: &Event) -> Option<usize> {
    match e {
        Event::PoleHit { step }
        | Event::ConvergedTo { step, .. }
        | Event::Escaped { step }
        | Event::PrecisionExhausted { step }
        | Event::SizeCeiling { step } => Some(*step),
        Event::SphereCycleDetected { .. } => None,
    }
}

fn verify_options(cfg: &RunConfig) -> VerifyOptions {
    VerifyOptions { steps: cfg.steps, iterate: iterate_options(cfg), corrupt_step: cfg.corrupt_step }
}

fn run_verify(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let f = params(cfg)?;
    let x0 = start_point(cfg)?;
    let r = verify(&f, &x0, &verify_options(cfg))?;
    let mut rep = Report::new(
        Command::Verify,
        cfg,
        json!({"params": r.params, "case": r.case, "x0": r.x0, "backend": r.backend.to_string(), "steps": r.steps_requested}),
    );
    rep.columns = &["record", "step", "anchor", "observed_exp", "predicted", "star_exp", "matched", "note"];
    for m in &r.models {
        rep.push(
            json!({"record": "model", "anchor": m.anchor, "point": m.point, "shape": m.shape, "alpha_exp": exp(&m.alpha),
                   "beta_exp": exp(&m.beta), "c_norm_exp": exp(&m.c_norm), "regime": m.regime, "case_label": m.case_label,
                   "start_radius_exp": exp(&m.start_radius), "verdict": m.verdict}),
            vec![
                "model".into(),
                String::new(),
                m.anchor.to_string(),
                exp(&m.start_radius),
                verdict_text(&m.verdict),
                String::new(),
                String::new(),
                m.case_label.map(|c| format!("{c:?}")).unwrap_or_default(),
            ],
        );
    }
    for s in &r.records {
        let star = s.star.as_ref().map(exp);
        rep.push(
            json!({"record": "step", "step": s.step, "anchor": s.anchor, "observed_exp": exp(&s.observed),
                   "predicted": constraint_text(&s.predicted), "star_exp": star, "matched": s.matched, "note": s.note}),
            vec![
                "step".into(),
                s.step.to_string(),
                s.anchor.to_string(),
                exp(&s.observed),
                constraint_text(&s.predicted),
                star.unwrap_or_default(),
                s.matched.to_string(),
                s.note.clone().unwrap_or_default(),
            ],
        );
    }
    for c in &r.claims {
        rep.push(
            json!({"record": "claim", "claim": c.claim, "status": c.status, "detail": c.detail}),
            vec!["claim".into(), String::new(), String::new(), String::new(), c.claim.clone(), String::new(), format!("{:?}", c.status).to_lowercase(), c.detail.clone()],
        );
    }
    let events: Vec<String> = r.events.iter().map(event_name).collect();
    rep.push(
        json!({"record": "summary", "passed": r.passed, "steps_run": r.steps_run, "first_divergence": r.first_divergence,
               "events": r.events, "notes": r.notes}),
        vec![
            "summary".into(),
            r.steps_run.to_string(),
            String::new(),
            String::new(),
            r.first_divergence.map(|d| format!("first_divergence={d}")).unwrap_or_default(),
            String::new(),
            r.passed.to_string(),
            events.join(";"),
        ],
    );
    rep.write(cfg.format, out)?;
    verify_exit(&r, err)
}

fn verify_exit(r: &VerificationReport, err: &mut dyn Write) -> CmdResult {
    if r.events.contains(&Event::PoleHit { step: 0 }) {
        writeln!(err, "x0 is the pole")?;
        return Ok(EXIT_POLE);
    }
    if r.passed {
        return Ok(EXIT_OK);
    }
    if let Some(n) = r.first_divergence {
        for s in r.records.iter().filter(|s| s.step == n && !s.matched) {
            writeln!(err, "mismatch at step {n}, anchor {}: observed {}, predicted {}", s.anchor, exp(&s.observed), constraint_text(&s.predicted))?;
        }
    }
    for c in r.claims.iter().filter(|c| c.status == crate::orbit::ClaimStatus::Fails) {
        writeln!(err, "claim failed: {}: {}", c.claim, c.detail)?;
    }
    Ok(EXIT_MISMATCH)
}

const SWEEP_COLUMNS: &[&str] = &[
    "p",
    "a",
    "b",
    "c",
    "d",
    "status",
    "case",
    "local_types",
    "cycle_multiplier_norm_exp",
    "x0",
    "verify_passed",
    "first_divergence",
    "error",
];

/// The default start for sweep cells: the first rational anchor (or the pole)
/// shifted by `p`.
fn default_start(f: &MapParams) -> ExactElement {
    let p = BigRational::from(BigInt::from(f.p().get()));
    let base = f
        .deviations()
        .ok()
        .and_then(|(anchors, _)| anchors.into_iter().find_map(|a| a.as_rational().cloned()))
        .unwrap_or_else(|| f.pole());
    ExactElement::rational(base + p)
}

fn sweep_cell(cfg: &RunConfig, p: u64, a: &str, b: &str, c: &str, d: &str) -> Vec<String> {
    let mut row = vec![p.to_string(), a.into(), b.into(), c.into(), d.into()];
    let f = match MapParams::parse(p, a, b, c, d) {
        Ok(f) => f,
        Err(e) => {
            row.extend(["invalid".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), e.to_string()]);
            return row;
        }
    };
    let (types, cyc) = match f.case() {
        CaseTag::UniqueFixed | CaseTag::TwoFixed => match f.fixed_points() {
            Ok(fps) => (fps.points.iter().map(|x| local_type(x.local_type)).collect::<Vec<_>>().join(";"), String::new()),
            Err(e) => (format!("error: {e}"), String::new()),
        },
        CaseTag::NoFixed => match f.two_cycle() {
            Ok(cy) => (local_type(cy.local_type), exp(&cy.cycle_multiplier_norm)),
            Err(e) => (format!("error: {e}"), String::new()),
        },
        CaseTag::Identity => (String::new(), String::new()),
    };
    let x0 = match &cfg.x0 {
        Some(s) => ExactElement::parse(s).map_err(|e| e.to_string()),
        None => Ok(default_start(&f)),
    };
    let (x0s, passed, div, error) = match x0 {
        Err(e) => (String::new(), String::new(), String::new(), e),
        Ok(x0) => match verify(&f, &x0, &verify_options(cfg)) {
            Ok(r) => (x0.to_string(), r.passed.to_string(), r.first_divergence.map(|n| n.to_string()).unwrap_or_default(), String::new()),
            Err(e) => (x0.to_string(), String::new(), String::new(), e.to_string()),
        },
    };
    row.extend(["valid".into(), f.case().to_string(), types, cyc, x0s, passed, div, error]);
    row
}

fn sweep(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let one = |v: &[String], k: &str| -> Result<Vec<String>, String> {
        if v.is_empty() {
            Err(format!("--{k} is required"))
        } else {
            Ok(v.to_vec())
        }
    };
    if cfg.p.is_empty() {
        return Err("--p is required".into());
    }
    let (a, b, c, d) = (one(&cfg.a, "a")?, one(&cfg.b, "b")?, one(&cfg.c, "c")?, one(&cfg.d, "d")?);
    let mut cells = Vec::new();
    for &p in &cfg.p {
        for a in &a {
            for b in &b {
                for c in &c {
                    for d in &d {
                        cells.push((p, a.as_str(), b.as_str(), c.as_str(), d.as_str()));
                    }
                }
            }
        }
    }
    let rows: Vec<Vec<String>> = cells.par_iter().map(|&(p, a, b, c, d)| sweep_cell(cfg, p, a, b, c, d)).collect();
    let mut rep = Report::new(Command::Sweep, cfg, json!({"cells": rows.len(), "backend": cfg.backend, "steps": cfg.steps}));
    rep.columns = SWEEP_COLUMNS;
    let mut failed = false;
    for row in rows {
        let mut obj = serde_json::Map::new();
        obj.insert("record".into(), json!("cell"));
        for (k, v) in SWEEP_COLUMNS.iter().zip(&row) {
            obj.insert((*k).into(), json!(v));
        }
        failed |= row[10] == "false";
        rep.push(Value::Object(obj), row);
    }
    rep.write(cfg.format, out)?;
    Ok(if failed { EXIT_MISMATCH } else { EXIT_OK })
}

fn basin(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let f = params(cfg)?;
    let opts = BasinOptions {
        radius_exps: cfg.radii.clone(),
        samples: cfg.samples,
        steps: cfg.steps,
        converge_exp: -cfg.threshold_exp,
        seed: cfg.seed,
        precision: cfg.precision,
    };
    let r = basin_probe(&f, &opts)?;
    let mut rep = Report::new(
        Command::Basin,
        cfg,
        json!({"params": r.params, "fixed_point": r.fixed_point, "delta_exp": exp(&r.delta),
               "multiplier_norm_exp": exp(&r.multiplier_norm), "samples": cfg.samples, "steps": cfg.steps}),
    );
    rep.columns = &["radius_exp", "branch", "sampled", "exceptional", "converged", "invariance_violations", "critical_outcomes"];
    for s in &r.spheres {
        let outcomes = serde_json::to_value(&s.critical_outcomes)?;
        rep.push(
            json!({"record": "sphere", "radius_exp": exp(&s.radius), "branch": s.branch, "sampled": s.sampled,
                   "exceptional": s.exceptional, "converged": s.converged, "invariance_violations": s.invariance_violations,
                   "critical_outcomes": outcomes, "final_exponents": s.final_exponents}),
            vec![
                exp(&s.radius),
                format!("{:?}", s.branch).to_lowercase(),
                s.sampled.to_string(),
                s.exceptional.to_string(),
                s.converged.to_string(),
                s.invariance_violations.to_string(),
                outcomes.to_string(),
            ],
        );
    }
    rep.write(cfg.format, out)?;
    Ok(EXIT_OK)
}

fn probe(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let f = params(cfg)?;
    let x0 = start_point(cfg)?;
    let v = exceptional_probe(&f, &x0, cfg.depth)?;
    let replayed = matches!(v, ExceptionalVerdict::InSet { .. }).then(|| replay_certificate(&f, &x0, &v));
    let mut rep = Report::new(Command::Probe, cfg, json!({"params": f.to_string(), "x0": x0.to_string(), "depth": cfg.depth}));
    rep.columns = &["verdict", "step", "target", "certified_from", "replayed"];
    let csv = match &v {
        ExceptionalVerdict::InSet { step, target } => {
            vec!["in_set".into(), step.to_string(), format!("{target:?}").to_lowercase(), String::new(), replayed.unwrap_or(false).to_string()]
        }
        ExceptionalVerdict::NotWithinDepth { depth, certified_from } => vec![
            "not_within_depth".into(),
            depth.to_string(),
            String::new(),
            certified_from.map(|n| n.to_string()).unwrap_or_default(),
            String::new(),
        ],
        ExceptionalVerdict::Undecided { reached, reason } => {
            vec!["undecided".into(), reached.to_string(), String::new(), String::new(), reason.clone()]
        }
    };
    let mut j = serde_json::to_value(&v)?;
    if let Value::Object(o) = &mut j {
        o.insert("record".into(), json!("probe"));
        o.insert("replayed".into(), json!(replayed));
    }
    rep.push(j, csv);
    rep.write(cfg.format, out)?;
    if replayed == Some(false) {
        return Ok(EXIT_INVALID);
    }
    Ok(EXIT_OK)
}
