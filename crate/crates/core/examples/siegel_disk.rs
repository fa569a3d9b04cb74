//! An indifferent fixed point: spheres around it are invariant.

use padyn::orbit::{basin_probe, BasinOptions};
use padyn::{ExactElement, MapParams};

fn main() {
    let f = MapParams::parse(5, "0", "2", "1", "1").unwrap();
    // f(0) = 2 lands on the fixed point, so the unit sphere is not invariant
    println!("{f}: f(0) = {}", f.eval(&ExactElement::zero()).unwrap());
    let opts = BasinOptions { radius_exps: vec![-3, -2, -1, 0, 1, 2, 3], samples: 5, steps: 30, converge_exp: -100_000, seed: 7, precision: 40 };
    let rep = basin_probe(&f, &opts).unwrap();
    println!("x* = {}, |f'(x*)| = {}", rep.fixed_point, rep.multiplier_norm);
    for s in &rep.spheres {
        println!("  r = {}: {} sampled, {} exceptional, {} left the sphere", s.radius, s.sampled, s.exceptional, s.invariance_violations);
    }
}
