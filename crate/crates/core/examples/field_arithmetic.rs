//! Valuations, norms, digit expansions and square roots in ℚ_p and ℚ_p(√D).

use padyn::field::rational::valuation;
use padyn::field::{digits, parse_rational, sqrt_class, SqrtClass};
use padyn::{ExactElement, Prime};

fn main() {
    let p3 = Prime::new(3).unwrap();
    let p5 = Prime::new(5).unwrap();

    for s in ["18", "5/3", "-1024", "7/45"] {
        let x = parse_rational(s).unwrap();
        println!("v_3({s}) = {:?}, |{s}|_3 = {}", valuation(&x, p3), ExactElement::rational(x.clone()).norm(p3));
    }

    // -1/3 in ℚ_5 has a periodic expansion
    let (v, ds) = digits(&parse_rational("-1/3").unwrap(), p5, 10).unwrap();
    println!("-1/3 = 5^{v} * digits {ds:?} (least significant first)");

    for (s, p) in [("2", 7u64), ("7", 3), ("-1", 5), ("3", 3)] {
        let p = Prime::new(p).unwrap();
        match sqrt_class(&parse_rational(s).unwrap(), p, 8) {
            SqrtClass::SquareInBase { root } => println!("sqrt({s}) in Q_{p}: {root}"),
            SqrtClass::NeedsExtension => println!("sqrt({s}) needs Q_{p}(sqrt({s}))"),
        }
    }

    // ramified: |√3|_3 = 3^(-1/2)
    let x = ExactElement::parse("1 + 2*sqrt(3)").unwrap();
    let y = ExactElement::parse("1/2 - sqrt(3)").unwrap();
    println!("x = {x}, |x - 1|_3 = {}", x.try_sub(&ExactElement::from_int(1)).unwrap().norm(p3));
    println!("x * y = {}, field norm of x = {}", x.try_mul(&y).unwrap(), x.field_norm());
    println!("x / y = {}", x.try_div(&y).unwrap());
}
