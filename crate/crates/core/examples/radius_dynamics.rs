//! The piecewise radius maps on their own: steps, limits, fixed sets and cycles.

use padyn::radius::{CycleSearch, LimitVerdict, PiecewiseSpec, SetTerm};
use padyn::Radius;

fn verdict(v: &LimitVerdict) -> String {
    match v {
        LimitVerdict::ConvergesTo(r) => format!("converges to {r}"),
        LimitVerdict::Fixed(r) => format!("fixed at {r}"),
        LimitVerdict::EntersCycle { cycle, .. } => format!("cycle [{}]", cycle.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")),
        LimitVerdict::DivergesToInfinity => "diverges".into(),
        LimitVerdict::LandsInSphereSet { bound, note } => format!("lands on a sphere with {bound:?} ({note})"),
    }
}

fn term(t: &SetTerm) -> String {
    match t {
        SetTerm::Point(r) => r.to_string(),
        SetTerm::Open { lo, hi } => format!("({lo}, {hi})"),
    }
}

fn main() {
    let e = Radius::exp;
    let specs = [
        ("zero inside, |c| = 1", PiecewiseSpec::zero_inside(e(-2), e(0), e(0), Some((e(-5), e(1)))).unwrap()),
        ("zero inside, |c| = 3", PiecewiseSpec::zero_inside(e(-2), e(0), e(-1), Some((e(-4), e(0)))).unwrap()),
        ("pole inside, |c| = 1/3", PiecewiseSpec::pole_inside(e(1), e(-1), e(1), Some((e(0), e(2)))).unwrap()),
        ("coincident, |c| = 1/3", PiecewiseSpec::coincident(e(0), e(1), Some(e(-3))).unwrap()),
    ];
    for (name, s) in &specs {
        println!("{name}: {:?}", s.case_label().unwrap());
        println!("  fixed radii: {}", s.fixed_point_set().unwrap().terms.iter().map(term).collect::<Vec<_>>().join(" ∪ "));
        for r in [e(-4), e(-2), e(-1), e(0), e(2)] {
            let orbit: Vec<String> = s.orbit(&r, 6).unwrap().iter().map(|x| x.to_string()).collect();
            println!("  {r}: {} -> {}", orbit.join(", "), verdict(&s.classify_limit(&r).unwrap()));
            if let CycleSearch::Cycle { cycle, entry, .. } = s.find_cycle(&r, 100).unwrap() {
                println!("    enters a cycle of length {} after {entry} steps", cycle.len());
            }
        }
    }
}
