//! Rational helpers: parsing, p-adic valuation, residues and digit expansions.

use super::{FieldError, Prime};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Parses `n` or `n/m` with an optional sign. Whitespace around tokens is ignored.
pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let err = |reason: &str| FieldError::Parse { input: s.to_string(), reason: reason.to_string() };
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err("empty"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t.as_str(), "1"),
    };
    let n: BigInt = parse_int(num).ok_or_else(|| err("bad numerator"))?;
    let d: BigInt = parse_int(den).ok_or_else(|| err("bad denominator"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix('+').unwrap_or(s);
    let digits = body.strip_prefix('-').unwrap_or(body);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    body.parse().ok()
}

/// `n` or `n/m` in lowest terms; reparses to the same value.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: Prime) -> u64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p.get());
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

fn uint_valuation(n: &BigUint, p: Prime) -> u64 {
    int_valuation(&BigInt::from_biguint(Sign::Plus, n.clone()), p)
}

pub(crate) fn uint_split(n: &BigUint, p: Prime) -> (u64, BigUint) {
    let v = uint_valuation(n, p);
    (v, n / pow_p(p, v as u32))
}

/// p-adic valuation, `None` for zero.
pub fn valuation(x: &BigRational, p: Prime) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(int_valuation(x.numer(), p) as i64 - int_valuation(x.denom(), p) as i64)
}

/// Splits a nonzero `x` as `p^v · u` with `u` a p-adic unit.
pub fn split_unit(x: &BigRational, p: Prime) -> (i64, BigRational) {
    let v = valuation(x, p).expect("split_unit of zero");
    let pb = BigInt::from(p.get());
    let scale = pb.pow(v.unsigned_abs() as u32);
    let u = if v >= 0 { x / BigRational::from(scale) } else { x * BigRational::from(scale) };
    (v, u)
}

pub fn pow_p(p: Prime, k: u32) -> BigUint {
    BigUint::from(p.get()).pow(k)
}

/// `x mod p^k` for a p-integral rational `x`, as a residue in `[0, p^k)`.
pub fn residue(x: &BigRational, p: Prime, k: u32) -> BigUint {
    let m = BigInt::from(pow_p(p, k));
    let inv = mod_inverse(&x.denom().mod_floor(&m), &m).expect("residue of non-integral rational");
    let r = (x.numer().mod_floor(&m) * inv).mod_floor(&m);
    r.to_biguint().expect("nonnegative residue")
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Canonical expansion `x = Σ_{i≥v} d_i p^i`: returns `v` and the first `n` digits.
pub fn digits(x: &BigRational, p: Prime, n: usize) -> Result<(i64, Vec<u64>), FieldError> {
    if x.is_zero() {
        return Err(FieldError::ZeroExpansion);
    }
    let (v, u) = split_unit(x, p);
    let r = residue(&u, p, n as u32);
    Ok((v, base_p_digits(&r, p, n)))
}

/// Little-endian base-`p` digits of `r`, padded or cut to `n`.
pub fn base_p_digits(r: &BigUint, p: Prime, n: usize) -> Vec<u64> {
    let pb = BigUint::from(p.get());
    let mut out = Vec::with_capacity(n);
    let mut m = r.clone();
    for _ in 0..n {
        let (q, d) = m.div_rem(&pb);
        out.push(d.to_u64().expect("digit fits"));
        m = q;
    }
    out
}

/// Exact rational square root, if one exists.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = int_sqrt_exact(x.numer())?;
    let d = int_sqrt_exact(x.denom())?;
    Some(BigRational::new(n, d))
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

const SQUARE_FACTOR_LIMIT: u64 = 1_000_000;

/// `n = sq² · rest` with square factors up to the limit removed.
fn square_split_u128(mut n: u128) -> (u128, u128) {
    let mut sq = 1u128;
    let mut f: u128 = 2;
    while f <= SQUARE_FACTOR_LIMIT as u128 && f * f <= n {
        if n.is_multiple_of(f) {
            while n.is_multiple_of(f * f) {
                n /= f * f;
                sq *= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    (sq, n)
}

/// Writes a nonzero rational as `k² · D` with `D` an integer free of small square
/// factors. Returns `(k, D)`; `D == 1` means `x` is a rational square.
pub fn square_split(x: &BigRational) -> (BigRational, BigInt) {
    assert!(!x.is_zero(), "square_split of zero");
    // x = n/m = (n·m)/m²
    let mut rad = x.numer() * x.denom();
    let mut k = BigRational::new(BigInt::one(), x.denom().clone());
    if let Some(n) = rad.abs().to_u128() {
        let (sq, rest) = square_split_u128(n);
        k *= BigRational::from(BigInt::from(sq));
        rad = BigInt::from(rest) * rad.signum();
    } else {
        let bound = |r: &BigInt| r.abs().sqrt().to_u64().unwrap_or(u64::MAX).min(SQUARE_FACTOR_LIMIT);
        let mut limit = bound(&rad);
        let mut f: u64 = 2;
        while f <= limit {
            if (&rad % f).is_zero() {
                let f2 = f * f;
                while (&rad % f2).is_zero() {
                    rad /= f2;
                    k *= BigRational::from(BigInt::from(f));
                }
                limit = bound(&rad);
            }
            f += if f == 2 { 1 } else { 2 };
        }
    }
    if !rad.is_negative() {
        if let Some(r) = int_sqrt_exact(&rad) {
            k *= BigRational::from(r);
            rad = BigInt::one();
        }
    }
    (k, rad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }
    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&q("18"), p(3)), Some(2));
        assert_eq!(valuation(&q("5/3"), p(3)), Some(-1));
        assert_eq!(valuation(&q("0"), p(3)), None);
        assert_eq!(valuation(&q("-1024"), p(2)), Some(10));
    }

    #[test]
    fn digit_expansions() {
        assert_eq!(digits(&q("18"), p(3), 3).unwrap(), (2, vec![2, 0, 0]));
        assert_eq!(digits(&q("-1"), p(3), 4).unwrap(), (0, vec![2, 2, 2, 2]));
        assert_eq!(digits(&q("1/2"), p(3), 3).unwrap(), (0, vec![2, 1, 1]));
        assert_eq!(digits(&q("0"), p(3), 3), Err(FieldError::ZeroExpansion));
    }

    #[test]
    fn parsing() {
        assert_eq!(q(" -6/4 "), BigRational::new((-3).into(), 2.into()));
        assert_eq!(q("+7"), BigRational::from(BigInt::from(7)));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("--1").is_err());
        assert!(parse_rational("").is_err());
        for s in ["0", "-3", "571/60", "-1/9"] {
            assert_eq!(format_rational(&q(s)), s);
        }
    }

    #[test]
    fn square_splitting() {
        assert_eq!(square_split(&q("12")), (q("2"), BigInt::from(3)));
        assert_eq!(square_split(&q("9/4")), (q("3/2"), BigInt::one()));
        assert_eq!(square_split(&q("-1/2")), (q("1/2"), BigInt::from(-2)));
        let (k, d) = square_split(&q("-44"));
        assert_eq!((k, d), (q("2"), BigInt::from(-11)));
    }

    #[test]
    fn residues() {
        assert_eq!(residue(&q("1/2"), p(5), 2), BigUint::from(13u32));
        assert_eq!(residue(&q("-1"), p(2), 3), BigUint::from(7u32));
    }
}
