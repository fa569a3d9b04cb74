//! Points whose forward orbit lands on the pole (or, without fixed points, on
//! one of its two preimages `-a ± √(-b)`).
//!
//! Exact iteration decides membership up to a depth. For rational points a
//! height bound often settles the rest: with `F₁ = X² + aXY + bY²` and
//! `F₂ = cXY + dY²`, solving `G₁F₁ + G₂F₂ = X³` (and `= Y³`) for linear
//! forms gives a constant `Q` with `H(f(x)) ≥ H(x)²/Q`. Once `H(x_n)` exceeds
//! `Q` and the height of every rational target, heights increase forever and
//! no later iterate can be a target.

use crate::field::ExactElement;
use crate::map::{CaseTag, MapError, MapParams};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExceptionalTarget {
    Pole,
    /// A root of `(x + a)² = -b`, mapped onto the pole by `f`.
    PolePreimage,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ExceptionalVerdict {
    /// `f^step(x)` is the target.
    InSet { step: usize, target: ExceptionalTarget },
    /// No hit up to `depth`. With `certified_from = Some(n)` the height bound
    /// rules out hits at every step from `n` on, beyond the depth too.
    NotWithinDepth { depth: usize, certified_from: Option<usize> },
    /// Iteration stopped at `reached` before the depth.
    Undecided { reached: usize, reason: String },
}

const SIZE_CEILING_BITS: u64 = 1 << 14;

/// Height `max(|num|, |den|)` of a rational in lowest terms.
pub fn height(x: &BigRational) -> BigInt {
    x.numer().abs().max(x.denom().abs())
}

fn solve4(mut m: [[BigRational; 5]; 4]) -> Option<[BigRational; 4]> {
    for col in 0..4 {
        let piv = (col..4).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = BigRational::one() / &m[col][col];
        for k in col..5 {
            m[col][k] = &m[col][k] * &inv;
        }
        for r in 0..4 {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in col..5 {
                    let t = &f * &m[col][k];
                    m[r][k] -= t;
                }
            }
        }
    }
    Some([m[0][4].clone(), m[1][4].clone(), m[2][4].clone(), m[3][4].clone()])
}

/// The constant `Q` with `H(f(x)) ≥ H(x)²/Q` for rational `x` off the pole;
/// `None` when numerator and denominator share a factor (the identity case).
pub fn growth_constant(params: &MapParams) -> Option<BigInt> {
    let (a, b, c, d) = (params.a(), params.b(), params.c(), params.d());
    let z = BigRational::zero;
    let o = BigRational::one;
    // integer forms D·F₁, D·F₂
    let den = [a, b, c, d].iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let dq = BigRational::from(den);
    let mut parts = Vec::new();
    for target in [[o(), z(), z(), z()], [z(), z(), z(), o()]] {
        // unknowns g0..g3 in G₁ = g0·X + g1·Y, G₂ = g2·X + g3·Y; rows are X³, X²Y, XY², Y³
        let rows = [
            [o(), z(), z(), z(), target[0].clone()],
            [a.clone(), o(), c.clone(), z(), target[1].clone()],
            [b.clone(), a.clone(), d.clone(), c.clone(), target[2].clone()],
            [z(), b.clone(), z(), d.clone(), target[3].clone()],
        ];
        let g = solve4(rows)?;
        let g: Vec<BigRational> = g.iter().map(|x| x / &dq).collect();
        let l = g.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let lq = BigRational::from(l.clone());
        let s: BigInt = g.iter().map(|x| (x * &lq).to_integer().abs()).sum();
        parts.push((l, s));
    }
    let (l1, s1) = &parts[0];
    let (l2, s2) = &parts[1];
    Some((s1 * l2).max(s2 * l1).max(BigInt::one()))
}

fn hits(params: &MapParams, x: &ExactElement, pole: &ExactElement, nofix: bool) -> Result<Option<ExceptionalTarget>, MapError> {
    if x == pole {
        return Ok(Some(ExceptionalTarget::Pole));
    }
    if nofix {
        let s = x.try_add(&ExactElement::rational(params.a().clone()))?;
        if s.try_mul(&s)?.try_add(&ExactElement::rational(params.b().clone()))?.is_zero() {
            return Ok(Some(ExceptionalTarget::PolePreimage));
        }
    }
    Ok(None)
}

/// Rational targets and their largest height.
fn target_height(params: &MapParams, nofix: bool) -> BigInt {
    let mut h = height(&params.pole());
    if nofix {
        if let Some(r) = crate::field::rational::rational_sqrt(&-params.b()) {
            for t in [-params.a() + &r, -params.a() - &r] {
                h = h.max(height(&t));
            }
        }
    }
    h
}

/// Searches the forward orbit of `x` for the pole (and its preimages when the
/// map has no fixed points) up to `depth` steps.
pub fn exceptional_probe(params: &MapParams, x: &ExactElement, depth: usize) -> Result<ExceptionalVerdict, MapError> {
    let nofix = params.case() == CaseTag::NoFixed;
    let pole = ExactElement::rational(params.pole());
    let bound = growth_constant(params).map(|q| q.max(target_height(params, nofix)));
    let mut cur = x.clone();
    for n in 0..=depth {
        if let Some(target) = hits(params, &cur, &pole, nofix)? {
            return Ok(ExceptionalVerdict::InSet { step: n, target });
        }
        if n == depth {
            break;
        }
        if let (Some(b), Some(r)) = (&bound, cur.as_rational()) {
            if height(r) > *b {
                return Ok(ExceptionalVerdict::NotWithinDepth { depth, certified_from: Some(n) });
            }
        }
        if cur.size_bits() > SIZE_CEILING_BITS {
            return Ok(ExceptionalVerdict::Undecided { reached: n, reason: "size ceiling".into() });
        }
        cur = params.eval(&cur)?;
    }
    Ok(ExceptionalVerdict::NotWithinDepth { depth, certified_from: None })
}

/// Re-runs an `InSet` certificate by direct iteration.
pub fn replay_certificate(params: &MapParams, x: &ExactElement, verdict: &ExceptionalVerdict) -> bool {
    let ExceptionalVerdict::InSet { step, target } = verdict else {
        return false;
    };
    let nofix = params.case() == CaseTag::NoFixed;
    let pole = ExactElement::rational(params.pole());
    let mut cur = x.clone();
    for _ in 0..*step {
        match params.eval(&cur) {
            Ok(y) => cur = y,
            Err(_) => return false,
        }
    }
    matches!(hits(params, &cur, &pole, nofix), Ok(Some(t)) if t == *target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(p: u64, a: &str, b: &str, c: &str, d: &str) -> MapParams {
        MapParams::parse(p, a, b, c, d).unwrap()
    }
    fn e(s: &str) -> ExactElement {
        ExactElement::parse(s).unwrap()
    }

    #[test]
    fn pole_and_its_preimage() {
        let f = m(3, "0", "2", "1", "1");
        let v = exceptional_probe(&f, &e("-1"), 10).unwrap();
        assert_eq!(v, ExceptionalVerdict::InSet { step: 0, target: ExceptionalTarget::Pole });
        // f(x) = -1 ⇔ x² + x + 3 = 0
        let x = e("-1/2 + 1/2*sqrt(-11)");
        assert_eq!(f.eval(&x).unwrap(), e("-1"));
        let v = exceptional_probe(&f, &x, 10).unwrap();
        assert_eq!(v, ExceptionalVerdict::InSet { step: 1, target: ExceptionalTarget::Pole });
        assert!(replay_certificate(&f, &x, &v));
    }

    #[test]
    fn cycle_case_preimages() {
        // f(x) = (x² - 2)/x, preimages of the pole 0 are ±√2
        let f = m(5, "0", "-2", "1", "0");
        let v = exceptional_probe(&f, &e("sqrt(2)"), 5).unwrap();
        assert_eq!(v, ExceptionalVerdict::InSet { step: 0, target: ExceptionalTarget::PolePreimage });
        assert!(replay_certificate(&f, &e("sqrt(2)"), &v));
    }

    #[test]
    fn generic_points_are_certified_out() {
        let f = m(3, "0", "2", "1", "1");
        let v = exceptional_probe(&f, &e("7/5"), 50).unwrap();
        assert!(matches!(v, ExceptionalVerdict::NotWithinDepth { depth: 50, certified_from: Some(_) }), "{v:?}");
        assert!(growth_constant(&m(3, "1", "0", "1", "1")).is_none());
    }

    #[test]
    fn height_growth_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (a, b, c, d) in [("0", "2", "1", "1"), ("1/2", "-3", "2", "5"), ("0", "0", "2", "1"), ("3", "1/7", "-4/3", "2")] {
            let f = m(5, a, b, c, d);
            let q = growth_constant(&f).unwrap();
            for _ in 0..300 {
                let n: i64 = rng.gen_range(-10_000..10_000);
                let dd: i64 = rng.gen_range(1..10_000);
                let x = BigRational::new(n.into(), dd.into());
                if x == f.pole() {
                    continue;
                }
                let y = f.eval(&ExactElement::rational(x.clone())).unwrap();
                let h = height(&x);
                assert!(height(y.as_rational().unwrap()) * &q >= &h * &h, "{x} under {f}");
            }
        }
    }
}
