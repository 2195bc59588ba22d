//! Valuations, the local additive character `ψ_p`, balls in `Q_p` and
//! coset representatives for `Z_p^×`.
//!
//! Elements of `Q_p` are only ever represented by rationals: every function
//! handled here is locally constant, so each relevant coset has a rational
//! representative.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::{rational_pow, Angle, Cyclotomic, Rational};
use crate::Error;

/// A rational prime, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Prime, Error> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^k` as an integer. Panics on `u64` overflow.
    pub fn pow(self, k: u32) -> u64 {
        self.0.checked_pow(k).expect("prime power overflows u64")
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn strip(n: &BigInt, p: u64) -> (BigInt, i64) {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return (n, k);
        }
        n = q;
        k += 1;
    }
}

/// `v_p(x)`, with `None` standing for `v_p(0) = +∞`.
pub fn vp(x: &Rational, p: Prime) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let (_, a) = strip(x.numer(), p.get());
    let (_, b) = strip(x.denom(), p.get());
    Some(a - b)
}

/// `|x|_p = p^(−v_p(x))`.
pub fn abs_p(x: &Rational, p: Prime) -> Rational {
    match vp(x, p) {
        None => Rational::zero(),
        Some(v) => rational_pow(p.get(), -v),
    }
}

/// The p-adic fractional part: the unique `r ∈ [0, 1)` whose denominator is a
/// power of `p` and with `x − r ∈ Z_p`.
pub fn frac_p(x: &Rational, p: Prime) -> Rational {
    let (den_unit, k) = strip(x.denom(), p.get());
    if k == 0 {
        return Rational::zero();
    }
    let pk = BigInt::from(p.get()).pow(k as u32);
    let inv = inv_mod_big(&den_unit.mod_floor(&pk), &pk);
    let r = (x.numer() * inv).mod_floor(&pk);
    Rational::new(r, pk)
}

/// [`frac_p`] as an [`Angle`]; fails when `p^k` exceeds the conductor limit.
pub fn frac_p_angle(x: &Rational, p: Prime) -> Result<Angle, Error> {
    Angle::from_rational(&frac_p(x, p))
}

/// `ψ_p(x) = e(frac_p(x))`; trivial on `Z_p` and `ψ_p(p^−n) = e(1/p^n)`.
pub fn psi_p(x: &Rational, p: Prime) -> Result<Cyclotomic, Error> {
    Ok(Cyclotomic::e(frac_p_angle(x, p)?))
}

fn inv_mod_big(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one(), "inverse of a non-unit");
    g.x.mod_floor(m)
}

/// Residue of a p-integral rational `x` modulo `p^k`, in `[0, p^k)`.
pub fn residue_mod(x: &Rational, p: Prime, k: u32) -> u64 {
    let pk = BigInt::from(p.pow(k));
    debug_assert!(!x.denom().is_multiple_of(&BigInt::from(p.get())), "residue of a non-integral element");
    let inv = inv_mod_big(&x.denom().mod_floor(&pk), &pk);
    (x.numer() * inv).mod_floor(&pk).to_u64().expect("residue below p^k")
}

/// The ball `center + p^level Z_p`.
///
/// The centre is stored canonically as the rational `Σ d_i p^i` with digits
/// `d_i ∈ {0, …, p−1}` for `v_p(center) ≤ i < level` (zero when the centre is
/// already in `p^level Z_p`), so equal balls compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicBall {
    p: Prime,
    center: Rational,
    level: i64,
}

impl PadicBall {
    pub fn new(p: Prime, center: Rational, level: i64) -> PadicBall {
        let scale = rational_pow(p.get(), level);
        let center = frac_p(&(&center / &scale), p) * scale;
        PadicBall { p, center, level }
    }

    /// `p^level Z_p`.
    pub fn around_zero(p: Prime, level: i64) -> PadicBall {
        PadicBall { p, center: Rational::zero(), level }
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn contains(&self, x: &Rational) -> bool {
        match vp(&(x - &self.center), self.p) {
            None => true,
            Some(v) => v >= self.level,
        }
    }

    /// Haar volume `p^(−level)` under `vol(Z_p) = 1`.
    pub fn volume(&self) -> Rational {
        rational_pow(self.p.get(), -self.level)
    }

    /// True when the ball lies inside `Z_p^×`.
    pub fn is_unit_coset(&self) -> bool {
        self.level >= 1 && vp(&self.center, self.p) == Some(0)
    }
}

impl fmt::Display for PadicBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}^{} Z_{}", self.center, self.p, self.level, self.p)
    }
}

/// `ball_contains` from the operation list.
pub fn ball_contains(b: &PadicBall, x: &Rational) -> bool {
    b.contains(x)
}

/// The integers in `[1, p^k]` prime to `p`; they represent
/// `Z_p^× / (1 + p^k Z_p)`. Requires `k ≥ 1`.
pub fn unit_coset_reps(p: Prime, k: u32) -> Vec<Rational> {
    unit_residues(p, k).map(|r| Rational::from_integer(BigInt::from(r))).collect()
}

pub(crate) fn unit_residues(p: Prime, k: u32) -> impl Iterator<Item = u64> {
    assert!(k >= 1, "unit cosets need k >= 1");
    let pk = p.pow(k);
    let q = p.get();
    (1..=pk).filter(move |r| r % q != 0)
}

/// Multiplicative volume of one coset of `1 + p^k Z_p`, i.e. `1/φ(p^k)`
/// under `vol(Z_p^×) = 1`.
pub fn unit_coset_volume(p: Prime, k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(totient_prime_power(p, k)))
}

pub(crate) fn totient_prime_power(p: Prime, k: u32) -> u64 {
    if k == 0 {
        1
    } else {
        (p.get() - 1) * p.pow(k - 1)
    }
}

/// True when the rational is a p-adic unit.
pub fn is_unit(x: &Rational, p: Prime) -> bool {
    vp(x, p) == Some(0)
}
