use core::cmp::Ordering;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{gcd_u64, Rational};
use crate::Error;

static CONDUCTOR_LIMIT: AtomicU64 = AtomicU64::new(1_000_000);

/// Largest denominator an angle (and hence a cyclotomic conductor) may have.
pub fn conductor_limit() -> u64 {
    CONDUCTOR_LIMIT.load(AtomicOrdering::Relaxed)
}

/// Change the process-wide conductor limit. The default is `10^6`.
pub fn set_conductor_limit(limit: u64) {
    CONDUCTOR_LIMIT.store(limit.max(1), AtomicOrdering::Relaxed);
}

/// A point `r = num/den` of `Q/Z`, stored reduced with `0 ≤ num < den`.
///
/// Ordered by numeric value in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Angle {
    num: u64,
    den: u64,
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };

    /// `num/den mod 1`, reduced. `den` must be positive.
    pub fn new(num: i128, den: u64) -> Angle {
        assert!(den > 0, "angle with zero denominator");
        let r = num.rem_euclid(den as i128) as u64;
        let g = gcd_u64(r, den);
        if r == 0 {
            return Angle::ZERO;
        }
        Angle { num: r / g, den: den / g }
    }

    /// `r mod 1`. Fails when the reduced denominator exceeds the conductor limit.
    pub fn from_rational(r: &Rational) -> Result<Angle, Error> {
        let den = r.denom();
        let limit = conductor_limit();
        let den_u = match den.to_u64() {
            Some(d) if d <= limit => d,
            _ => {
                return Err(Error::ConductorOverflow {
                    conductor: den.to_u128().unwrap_or(u128::MAX),
                    limit,
                })
            }
        };
        let num = r.numer().mod_floor(&BigInt::from(den_u));
        Ok(Angle::new(num.to_i128().expect("reduced below denominator"), den_u))
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_add(self, other: Angle) -> Result<Angle, Error> {
        let g = gcd_u64(self.den, other.den);
        let lcm = (self.den / g) as u128 * other.den as u128;
        let limit = conductor_limit();
        if lcm > limit as u128 {
            return Err(Error::ConductorOverflow { conductor: lcm, limit });
        }
        let lcm = lcm as u64;
        let a = self.num as i128 * (lcm / self.den) as i128;
        let b = other.num as i128 * (lcm / other.den) as i128;
        Ok(Angle::new(a + b, lcm))
    }

}

impl core::ops::Neg for Angle {
    type Output = Angle;

    fn neg(self) -> Angle {
        Angle::new(-(self.num as i128), self.den)
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
