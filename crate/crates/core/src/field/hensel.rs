//! Square roots in ℚ_p by Hensel lifting.
//!
//! The canonical root of a unit square `u` is the one whose first digit is
//! the smaller residue `r ≤ (p-1)/2` for odd `p`, and the one `≡ 1 (mod 4)`
//! for `p = 2`.

use super::rational::{mod_inverse, pow_p, residue, split_unit};
use super::truncated::Truncated;
use super::Prime;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SqrtClass {
    /// A root known to `n` significant digits.
    SquareInBase { root: Truncated },
    NeedsExtension,
}

/// Decides whether `s` is a square in ℚ_p and, if so, returns the canonical root to `n` digits.
pub fn sqrt_class(s: &BigRational, p: Prime, n: u32) -> SqrtClass {
    if s.is_zero() {
        return SqrtClass::SquareInBase { root: Truncated::exact_zero(p) };
    }
    if !is_square_in_qp(s, p) {
        return SqrtClass::NeedsExtension;
    }
    let (v, u) = split_unit(s, p);
    let r = unit_sqrt(&u, p, n.max(1));
    let root = Truncated::from_residue(p, v / 2, r, n.max(1)).expect("unit root");
    SqrtClass::SquareInBase { root }
}

pub(crate) fn is_square_in_qp(s: &BigRational, p: Prime) -> bool {
    if s.is_zero() {
        return true;
    }
    let (v, u) = split_unit(s, p);
    if v % 2 != 0 {
        return false;
    }
    if p.get() == 2 {
        residue(&u, p, 3) == BigUint::from(1u32)
    } else {
        let a = residue(&u, p, 1).to_u64().expect("residue fits");
        legendre(a, p.get()) == 1
    }
}

/// Canonical square root of a unit square `u`, modulo `p^n`.
pub(crate) fn unit_sqrt(u: &BigRational, p: Prime, n: u32) -> BigUint {
    if p.get() == 2 {
        return two_adic_sqrt(u, n);
    }
    let pp = p.get();
    let a = residue(u, p, 1).to_u64().expect("residue fits");
    let r0 = sqrt_mod_prime(a, pp).expect("unit is a square");
    let r0 = r0.min(pp - r0);
    let target = BigInt::from(residue(u, p, n));
    let mut r = BigInt::from(r0);
    let mut m = 1u32;
    while m < n {
        m = (2 * m).min(n);
        let modulus = BigInt::from(pow_p(p, m));
        let t = target.mod_floor(&modulus);
        let f = (&r * &r - &t).mod_floor(&modulus);
        let inv = mod_inverse(&(BigInt::from(2) * &r), &modulus).expect("2r is a unit");
        r = (&r - f * inv).mod_floor(&modulus);
    }
    r.mod_floor(&BigInt::from(pow_p(p, n))).to_biguint().expect("nonnegative")
}

fn two_adic_sqrt(u: &BigRational, n: u32) -> BigUint {
    let two = Prime::new(2).expect("2 is prime");
    let target = residue(u, two, n + 2);
    let mut r = BigUint::from(1u32);
    for k in 3..=n + 1 {
        let m = pow_p(two, k + 1);
        if (&r * &r) % &m != &target % &m {
            r += pow_p(two, k - 1);
        }
    }
    r % pow_p(two, n)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Tonelli–Shanks.
fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_rational;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }
    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn known_classes() {
        match sqrt_class(&q("6"), p(5), 2) {
            SqrtClass::SquareInBase { root } => {
                assert_eq!(root.valuation().unwrap(), 0);
                assert_eq!(root.unit_digits(), vec![1, 3]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(sqrt_class(&q("2"), p(5), 4), SqrtClass::NeedsExtension);
        assert_eq!(sqrt_class(&q("3"), p(3), 4), SqrtClass::NeedsExtension);
        assert_eq!(sqrt_class(&q("0"), p(7), 4), SqrtClass::SquareInBase { root: Truncated::exact_zero(p(7)) });
        assert_eq!(sqrt_class(&q("-7"), p(2), 4), sqrt_class(&q("-7"), p(2), 4));
        assert!(matches!(sqrt_class(&q("-7"), p(2), 4), SqrtClass::SquareInBase { .. }));
        assert_eq!(sqrt_class(&q("3"), p(2), 4), SqrtClass::NeedsExtension);
        assert!(matches!(sqrt_class(&q("-11"), p(3), 4), SqrtClass::SquareInBase { .. }));
    }

    #[test]
    fn roots_square_back() {
        for (pp, s) in [(5u64, "6"), (7, "2"), (2, "17"), (2, "-7"), (3, "-11/4"), (13, "10/9"), (7, "98")] {
            let n = 30;
            let SqrtClass::SquareInBase { root } = sqrt_class(&q(s), p(pp), n) else {
                panic!("{s} should be a square in Q_{pp}");
            };
            let sq = root.mul(&root).unwrap();
            assert!(sq.contains(&q(s)), "root of {s} at {pp}: {root}");
            assert!(sq.rel_precision() >= n - 1);
        }
    }

    #[test]
    fn canonical_choice() {
        let SqrtClass::SquareInBase { root } = sqrt_class(&q("17"), p(2), 10) else { panic!() };
        assert_eq!(root.unit_digits()[..2], [1, 0]);
        let SqrtClass::SquareInBase { root } = sqrt_class(&q("4"), p(7), 5) else { panic!() };
        assert!(root.contains(&q("2")));
        let SqrtClass::SquareInBase { root } = sqrt_class(&q("2"), p(7), 5) else { panic!() };
        assert_eq!(root.unit_digits()[0], 3);
    }

    #[test]
    fn tonelli_shanks_large_prime() {
        let pp = 1_000_000_007u64;
        for a in [2u64, 5, 123_456, 999_999_999] {
            if legendre(a, pp) == 1 {
                let r = sqrt_mod_prime(a, pp).unwrap();
                assert_eq!(mul_mod(r, r, pp), a % pp);
            }
        }
    }
}
