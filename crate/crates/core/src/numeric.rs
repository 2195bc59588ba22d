//! Float values with certified error radii, and truncation settings for the
//! infinite lattice sums.

use core::ops::Add;

use num_complex::Complex64;

use crate::exact::ComplexApprox;
use crate::Error;

pub const EPS: f64 = f64::EPSILON;

/// A complex value together with a radius `bound` that covers every
/// truncation and rounding error made while computing it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundedValue {
    pub value: Complex64,
    pub bound: f64,
}

impl BoundedValue {
    pub const ZERO: BoundedValue = BoundedValue { value: Complex64::new(0.0, 0.0), bound: 0.0 };

    pub fn new(value: Complex64, bound: f64) -> Self {
        BoundedValue { value, bound }
    }

    pub fn real(value: f64, bound: f64) -> Self {
        BoundedValue { value: Complex64::new(value, 0.0), bound }
    }

    /// Distance between the two centres.
    pub fn distance(&self, other: &BoundedValue) -> f64 {
        (self.value - other.value).norm()
    }

    /// True when the two discs intersect, i.e. the values are consistent.
    pub fn agrees_with(&self, other: &BoundedValue) -> bool {
        let d = self.distance(other);
        d <= (self.bound + other.bound) * (1.0 + 4.0 * EPS) + 4.0 * EPS * d
    }

    /// Multiply by a complex number known up to `err`.
    pub fn scale(&self, c: Complex64, err: f64) -> BoundedValue {
        let value = self.value * c;
        let bound = self.bound * (c.norm() + err) + self.value.norm() * err + 4.0 * EPS * value.norm();
        BoundedValue { value, bound: bound * (1.0 + 4.0 * EPS) }
    }
}

impl From<ComplexApprox> for BoundedValue {
    fn from(c: ComplexApprox) -> Self {
        BoundedValue { value: c.value(), bound: c.err }
    }
}

impl Add for BoundedValue {
    type Output = BoundedValue;

    fn add(self, rhs: BoundedValue) -> BoundedValue {
        let value = self.value + rhs.value;
        let bound = self.bound + rhs.bound + 2.0 * EPS * (value.re.abs() + value.im.abs());
        BoundedValue { value, bound: bound * (1.0 + 2.0 * EPS) }
    }
}

/// Running sum of complex terms with a rigorous rounding radius.
///
/// Terms are added in the order given. The radius accumulates the per-term
/// error passed in plus a bound for the floating point summation itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct SumAccumulator {
    sum: Complex64,
    term_err: f64,
    mass: f64,
    count: u64,
}

impl SumAccumulator {
    pub fn new() -> Self {
        SumAccumulator::default()
    }

    pub fn push(&mut self, term: Complex64, err: f64) {
        self.sum += term;
        self.term_err += err;
        self.mass += term.re.abs() + term.im.abs();
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Sum with radius `Σ err_i + (n+1)·ε·Σ|t_i|`.
    pub fn finish(&self) -> BoundedValue {
        let n = self.count as f64;
        let rounding = (n + 1.0) * EPS * self.mass;
        BoundedValue { value: self.sum, bound: (self.term_err + rounding) * (1.0 + 4.0 * EPS) }
    }
}

/// Truncation settings for the infinite sums over `Q^×`.
///
/// `tol` is the target for the certified tail bound. The two scale factors
/// multiply the numerator cutoff and the denominator bound that `tol` would
/// otherwise select; values above 1 are used to check that enlarging the
/// truncation moves the result by less than its reported bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    pub tol: f64,
    pub cutoff_scale: u32,
    pub denominator_scale: u32,
}

impl Truncation {
    pub fn new(tol: f64) -> Result<Self, Error> {
        check_tol(tol)?;
        Ok(Truncation { tol, cutoff_scale: 1, denominator_scale: 1 })
    }

    /// The same truncation with both cutoffs multiplied by `factor`.
    pub fn enlarged(&self, factor: u32) -> Self {
        Truncation {
            tol: self.tol,
            cutoff_scale: self.cutoff_scale * factor.max(1),
            denominator_scale: self.denominator_scale * factor.max(1),
        }
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<(), Error> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::BadTolerance(alloc::format!("{tol}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_bounds_cover_reordering() {
        let terms: alloc::vec::Vec<f64> = (1..200).map(|k| 1.0 / (k as f64 * k as f64)).collect();
        let mut fwd = SumAccumulator::new();
        let mut rev = SumAccumulator::new();
        for &t in &terms {
            fwd.push(Complex64::new(t, 0.0), 0.0);
        }
        for &t in terms.iter().rev() {
            rev.push(Complex64::new(t, 0.0), 0.0);
        }
        assert!(fwd.finish().agrees_with(&rev.finish()));
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(Truncation::new(0.0).is_err());
        assert!(Truncation::new(-1e-3).is_err());
        assert!(Truncation::new(f64::NAN).is_err());
        assert!(Truncation::new(1e-9).is_ok());
    }
}
