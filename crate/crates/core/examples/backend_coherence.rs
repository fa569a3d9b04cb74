//! The same orbit in exact, truncated and anchored arithmetic.

use padyn::orbit::{consistent, iterate, Backend, IterateOptions, OrbitPoint};
use padyn::{ExactElement, MapParams};

fn main() {
    let f = MapParams::parse(5, "0", "2", "1", "1").unwrap();
    let x0 = ExactElement::parse("17/3").unwrap();
    let steps = 10;
    let exact = iterate(&f, &x0, steps, &IterateOptions::default()).unwrap();
    let trunc = iterate(&f, &x0, steps, &IterateOptions::with_backend(Backend::Truncated(20))).unwrap();
    let anch = iterate(&f, &x0, steps, &IterateOptions::with_backend(Backend::Anchored(20))).unwrap();
    for n in 0..exact.len() {
        let x = exact.points[n].exact().unwrap();
        let agree = match &trunc.points[n] {
            OrbitPoint::Truncated(t) => consistent(t, x),
            _ => false,
        };
        println!(
            "n = {n:>2}: {} bits exact, truncated {}, radius {} / {} / {}",
            x.size_bits(),
            if agree { "agrees" } else { "DIFFERS" },
            exact.radius(0, n),
            trunc.radius(0, n),
            anch.radius(0, n)
        );
    }
    println!("events: exact {:?}, truncated {:?}, anchored {:?}", exact.events, trunc.events, anch.events);
}
