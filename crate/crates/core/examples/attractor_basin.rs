//! Sampling spheres around an attracting fixed point.

use padyn::orbit::{basin_probe, BasinOptions};
use padyn::MapParams;

fn main() {
    let f = MapParams::parse(3, "1", "1", "1", "0").unwrap();
    let opts = BasinOptions { radius_exps: vec![-3, -2, -1, 1, 2], samples: 10, steps: 25, converge_exp: -20, seed: 6, precision: 40 };
    let rep = basin_probe(&f, &opts).unwrap();
    println!("{}: x* = {}, |f'(x*)| = {}, δ = {}", rep.params, rep.fixed_point, rep.multiplier_norm, rep.delta);
    for s in &rep.spheres {
        // inside δ orbits should converge; outside they should stay on their sphere
        println!(
            "  r = {}: {:?}, {} sampled, {} converged, {} exceptional, {} left the sphere",
            s.radius, s.branch, s.sampled, s.converged, s.exceptional, s.invariance_violations
        );
    }
}
