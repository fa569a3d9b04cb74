//! The fixed-point-free case at p = 3: the 2-cycle attracts, linearly inside and
//! quadratically on the band between h/3 and h.

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
    let f = MapParams::parse(3, "0", "-2", "1", "0").unwrap();
    let cyc = f.two_cycle().unwrap();
    println!("{f}: cycle {} <-> {}, h = {}, |g'| = {}", cyc.points[0], cyc.points[1], cyc.h, cyc.cycle_multiplier_norm);
    for x0 in ["4", "1 + 2*sqrt(3)"] {
        let x = ExactElement::parse(x0).unwrap();
        let rep = verify(&f, &x, &VerifyOptions { steps: 6, ..Default::default() }).unwrap();
        println!("x0 = {x0}: start radius {} to anchor {}", rep.models[0].start_radius, rep.models[0].anchor);
        for r in &rep.records {
            println!("  step {}: anchor {}, exponent {}, predicted {}, matched {}", r.step, r.anchor, render_exponent(&r.observed), predicted(&r.predicted), r.matched);
        }
        println!("  passed: {}", rep.passed);
    }
}
