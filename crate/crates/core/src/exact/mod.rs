//! Exact rational and cyclotomic arithmetic.
//!
//! Everything computed at a finite place lives in some `Q(ζ_N)`; this module
//! provides the value type ([`Cyclotomic`]) together with the small pieces it
//! is built from: reduced angles `r ∈ Q/Z` and a float evaluation layer that
//! carries an error radius.

mod angle;
mod approx;
mod cyclotomic;

pub use angle::{conductor_limit, set_conductor_limit, Angle};
pub use approx::ComplexApprox;
pub use cyclotomic::{root_of_unity, Cyclotomic};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Parses from and displays as `"p/q"` (or `"n"` for integers).
pub type Rational = num_rational::BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest `f64`, or an infinity when the value is outside the `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    match r.to_f64() {
        Some(v) => v,
        None if r.is_negative() => f64::NEG_INFINITY,
        None => f64::INFINITY,
    }
}

/// `p^e` for a possibly negative exponent.
pub fn rational_pow(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::from(1), base)
    }
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m` (`gcd(a, m) = 1`, `m ≥ 1`).
pub(crate) fn inv_mod_u64(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inverse of a non-unit");
    old_s.rem_euclid(m as i128) as u64
}

/// Prime factorisation by trial division, primes ascending.
pub(crate) fn factor_u64(mut n: u64) -> alloc::vec::Vec<(u64, u32)> {
    let mut out = alloc::vec::Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
