use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{conductor_limit, factor_u64, gcd_u64, inv_mod_u64, rational_to_f64, Angle, ComplexApprox, Rational};
use crate::numeric::EPS;
use crate::Error;

/// An element of a cyclotomic field: a finite sum `Σ c_r · e(r)` with rational
/// coefficients `c_r` and angles `r ∈ Q/Z`, where `e(r) = exp(2πir)`.
///
/// Values are always kept in canonical form. With `N` the least common
/// multiple of the angle denominators and `N = ∏ p^k`, every angle decomposes
/// by CRT as `Σ a_p / p^k`; the canonical basis consists of the roots of
/// unity whose components satisfy `0 ≤ a_p < (p−1)p^(k−1)`. The basis for a
/// divisor of `N` is a subset of the basis for `N`, so the canonical form is
/// independent of the conductor it was computed at and two values are equal
/// as complex numbers exactly when their term maps are equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    terms: BTreeMap<Angle, Rational>,
}

/// `e(r mod 1)` in canonical form.
pub fn root_of_unity(r: &Rational) -> Result<Cyclotomic, Error> {
    Ok(Cyclotomic::e(Angle::from_rational(r)?))
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic::default()
    }

    pub fn one() -> Self {
        Cyclotomic::from_rational(Rational::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Angle::ZERO, c);
        }
        Cyclotomic { terms }
    }

    /// The root of unity `e(angle)`.
    pub fn e(angle: Angle) -> Self {
        let mut raw = BTreeMap::new();
        raw.insert(angle, Rational::one());
        reduce(raw).expect("an angle denominator is within the conductor limit")
    }

    /// Build from arbitrary (possibly repeated, non-canonical) terms.
    pub fn from_terms<I>(terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (Angle, Rational)>,
    {
        let mut raw: BTreeMap<Angle, Rational> = BTreeMap::new();
        for (a, c) in terms {
            accumulate(&mut raw, a, c);
        }
        reduce(raw)
    }

    /// Canonical terms in ascending angle order.
    pub fn terms(&self) -> impl Iterator<Item = (&Angle, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value, if this number is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Angle::ZERO).cloned(),
            _ => None,
        }
    }

    /// Least common multiple of the angle denominators of the canonical form.
    pub fn conductor(&self) -> u64 {
        self.terms.keys().fold(1u64, |acc, a| acc / gcd_u64(acc, a.den()) * a.den())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Cyclotomic::zero();
        }
        Cyclotomic { terms: self.terms.iter().map(|(a, v)| (*a, v * c)).collect() }
    }

    /// Multiply by the root of unity `e(angle)`.
    pub fn rotate(&self, angle: Angle) -> Result<Self, Error> {
        if angle.is_zero() {
            return Ok(self.clone());
        }
        let mut raw = BTreeMap::new();
        for (a, c) in &self.terms {
            accumulate(&mut raw, a.checked_add(angle)?, c.clone());
        }
        reduce(raw)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, Error> {
        // A canonical form for N is canonical for every multiple of N, so the
        // merged map needs no reduction; only the conductor limit is checked.
        let g = gcd_u64(self.conductor(), other.conductor());
        let lcm = (self.conductor() / g) as u128 * other.conductor() as u128;
        if lcm > conductor_limit() as u128 {
            return Err(Error::ConductorOverflow { conductor: lcm, limit: conductor_limit() });
        }
        let mut terms = self.terms.clone();
        for (a, c) in &other.terms {
            accumulate(&mut terms, *a, c.clone());
        }
        Ok(Cyclotomic { terms })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, Error> {
        if self.is_zero() || other.is_zero() {
            return Ok(Cyclotomic::zero());
        }
        if let Some(c) = self.as_rational() {
            return Ok(other.scale(&c));
        }
        if let Some(c) = other.as_rational() {
            return Ok(self.scale(&c));
        }
        let mut raw = BTreeMap::new();
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                accumulate(&mut raw, a.checked_add(*b)?, c * d);
            }
        }
        reduce(raw)
    }

    /// Complex conjugate: `e(r) ↦ e(−r)`.
    pub fn conj(&self) -> Self {
        let raw = self.terms.iter().map(|(a, c)| (-*a, c.clone())).collect();
        reduce(raw).expect("conjugation preserves the conductor")
    }

    /// Float value with a radius bounding all rounding error.
    pub fn eval(&self) -> ComplexApprox {
        if self.terms.is_empty() {
            return ComplexApprox::ZERO;
        }
        let mut re = 0.0;
        let mut im = 0.0;
        let mut mass = 0.0;
        for (a, c) in &self.terms {
            let c = rational_to_f64(c);
            let (s, co) = sincos_turns(a);
            re += c * co;
            im += c * s;
            mass += c.abs();
        }
        let n = self.terms.len() as f64;
        ComplexApprox { re, im, err: (n + 16.0) * EPS * mass * (1.0 + 4.0 * EPS) }
    }
}

/// `(sin 2πr, cos 2πr)`, using the symmetry of the circle to keep the
/// argument passed to libm in `[0, π/4]`.
fn sincos_turns(a: &Angle) -> (f64, f64) {
    // exact octant reduction in integers
    let n = a.num() as u128 * 8;
    let d = a.den() as u128;
    let octant = (n / d) as u32;
    let rem = n % d; // r·8 − octant ∈ [0, 1)
    let frac = rem as f64 / d as f64;
    let (t, flip) = if octant.is_multiple_of(2) { (frac, false) } else { (1.0 - frac, true) };
    let x = t * core::f64::consts::FRAC_PI_4;
    let (s0, c0) = (libm::sin(x), libm::cos(x));
    // angle within octant measured from the octant's base line
    let (s, c) = if flip { (c0, s0) } else { (s0, c0) };
    match octant {
        0 => (s, c),
        1 => (s, c),
        2 => (c, -s),
        3 => (c, -s),
        4 => (-s, -c),
        5 => (-s, -c),
        6 => (-c, s),
        _ => (-c, s),
    }
}

fn accumulate(map: &mut BTreeMap<Angle, Rational>, a: Angle, c: Rational) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(a).or_insert_with(Rational::zero);
    *entry += c;
    if entry.is_zero() {
        map.remove(&a);
    }
}

/// Reduce an arbitrary term map to canonical form.
fn reduce(raw: BTreeMap<Angle, Rational>) -> Result<Cyclotomic, Error> {
    let raw: BTreeMap<Angle, Rational> = raw.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    if raw.is_empty() {
        return Ok(Cyclotomic::zero());
    }
    let mut n: u128 = 1;
    for a in raw.keys() {
        n = n / gcd_u64(n as u64, a.den()) as u128 * a.den() as u128;
        if n > conductor_limit() as u128 {
            return Err(Error::ConductorOverflow { conductor: n, limit: conductor_limit() });
        }
    }
    let n = n as u64;
    if n == 1 {
        return Ok(Cyclotomic { terms: raw });
    }

    struct PrimePower {
        p: u64,
        modulus: u64,
        cofactor: u64,
        cofactor_inv: u64,
        bound: u64,
        step: u64,
    }
    let parts: Vec<PrimePower> = factor_u64(n)
        .into_iter()
        .map(|(p, e)| {
            let modulus = p.pow(e);
            let cofactor = n / modulus;
            PrimePower {
                p,
                modulus,
                cofactor,
                cofactor_inv: inv_mod_u64(cofactor % modulus, modulus),
                bound: (p - 1) * p.pow(e - 1),
                step: p.pow(e - 1),
            }
        })
        .collect();

    let mut out: BTreeMap<u64, Rational> = BTreeMap::new();
    for (a, c) in raw {
        let k = a.num() as u128 * (n / a.den()) as u128;
        let mut combos: Vec<(u64, bool)> = vec![(0, false)];
        for part in &parts {
            let comp = ((k % part.modulus as u128) * part.cofactor_inv as u128 % part.modulus as u128) as u64;
            let pieces: Vec<(u64, bool)> = if comp < part.bound {
                vec![(comp, false)]
            } else {
                // ζ^(bound + j) = −Σ_{i<p−1} ζ^(j + i·step) from Φ_{p^e}(ζ) = 0
                let j = comp - part.bound;
                (0..part.p - 1).map(|i| (j + i * part.step, true)).collect()
            };
            let mut next = Vec::with_capacity(combos.len() * pieces.len());
            for &(acc, s) in &combos {
                for &(x, t) in &pieces {
                    let v = (acc as u128 + x as u128 * part.cofactor as u128) % n as u128;
                    next.push((v as u64, s ^ t));
                }
            }
            combos = next;
        }
        for (k, negative) in combos {
            let entry = out.entry(k).or_insert_with(Rational::zero);
            if negative {
                *entry -= &c;
            } else {
                *entry += &c;
            }
        }
    }
    let terms = out
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (Angle::new(k as i128, n), c))
        .collect();
    Ok(Cyclotomic { terms })
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;

    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_add(rhs).expect("cyclotomic conductor limit exceeded")
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;

    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_add(&-rhs).expect("cyclotomic conductor limit exceeded")
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;

    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_mul(rhs).expect("cyclotomic conductor limit exceeded")
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;

    fn neg(self) -> Cyclotomic {
        Cyclotomic { terms: self.terms.iter().map(|(a, c)| (*a, -c)).collect() }
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;

    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        &self + &rhs
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;

    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        &self - &rhs
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;

    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        &self * &rhs
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;

    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, c)) in self.terms.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            if a.is_zero() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "e({a})")?;
            } else {
                write!(f, "{mag}*e({a})")?;
            }
        }
        Ok(())
    }
}
