//! Points whose forward orbit reaches the pole.

use padyn::orbit::{exceptional_probe, replay_certificate, ExceptionalVerdict};
use padyn::{ExactElement, MapParams};

fn main() {
    let f = MapParams::parse(3, "0", "2", "1", "1").unwrap();
    println!("{f}: pole at {}", f.pole());
    for x0 in ["-1", "-1/2 + 1/2*sqrt(-11)", "7/5", "11"] {
        let x = ExactElement::parse(x0).unwrap();
        let v = exceptional_probe(&f, &x, 30).unwrap();
        match &v {
            ExceptionalVerdict::InSet { step, target } => {
                println!("x0 = {x0}: reaches {target:?} at step {step}, replayed {}", replay_certificate(&f, &x, &v))
            }
            ExceptionalVerdict::NotWithinDepth { depth, certified_from: Some(n) } => {
                println!("x0 = {x0}: no hit within {depth} steps, height bound rules out hits from step {n} on")
            }
            ExceptionalVerdict::NotWithinDepth { depth, certified_from: None } => println!("x0 = {x0}: no hit within {depth} steps"),
            ExceptionalVerdict::Undecided { reached, reason } => println!("x0 = {x0}: undecided at step {reached}: {reason}"),
        }
    }
}
