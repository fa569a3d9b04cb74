//! Two fixed points: radii to both are checked against the radius dynamics.

use padyn::orbit::{verify, VerifyOptions};
use padyn::cli::render_exponent;
use padyn::radius::Constraint;
use padyn::{ExactElement, MapParams};

fn predicted(c: &Constraint) -> String {
    match c {
        Constraint::Exact(r) => format!("= {}", render_exponent(r)),
        Constraint::AtMost(r) => format!("<= {}", render_exponent(r)),
        Constraint::AtLeast(r) => format!(">= {}", render_exponent(r)),
        Constraint::Free => "any".into(),
    }
}

fn main() {
    let f = MapParams::parse(3, "0", "0", "2", "1").unwrap();
    let rep = verify(&f, &ExactElement::from_int(9), &VerifyOptions { steps: 8, ..Default::default() }).unwrap();
    for m in &rep.models {
        println!("anchor {} = {}: {:?}, α = {}, β = {}, |c| = {}", m.anchor, m.point, m.shape, m.alpha, m.beta, m.c_norm);
    }
    for r in &rep.records {
        let star = r.star.as_ref().map(|s| format!(", star {s}")).unwrap_or_default();
        println!("  step {} anchor {}: exponent {}, predicted {}{star}", r.step, r.anchor, render_exponent(&r.observed), predicted(&r.predicted));
    }
    for c in &rep.claims {
        println!("claim {}: {:?} ({})", c.claim, c.status, c.detail);
    }
    println!("passed: {}", rep.passed);
}
