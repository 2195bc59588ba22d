use core::ops::{Add, Mul};

use num_complex::Complex64;

use crate::numeric::EPS;

/// A float approximation `re + i·im` of an exact value together with a radius
/// `err` such that the exact value lies within distance `err`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexApprox {
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

impl ComplexApprox {
    pub const ZERO: ComplexApprox = ComplexApprox { re: 0.0, im: 0.0, err: 0.0 };

    pub fn exact(value: Complex64) -> Self {
        ComplexApprox { re: value.re, im: value.im, err: 0.0 }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    /// True when `other` lies inside the combined error discs.
    pub fn overlaps(&self, other: &ComplexApprox) -> bool {
        let d = libm::hypot(self.re - other.re, self.im - other.im);
        d <= (self.err + other.err) * (1.0 + 4.0 * EPS) + 4.0 * EPS * d
    }
}

impl Add for ComplexApprox {
    type Output = ComplexApprox;

    fn add(self, rhs: ComplexApprox) -> ComplexApprox {
        let re = self.re + rhs.re;
        let im = self.im + rhs.im;
        let err = (self.err + rhs.err + EPS * (re.abs() + im.abs())) * (1.0 + 2.0 * EPS);
        ComplexApprox { re, im, err }
    }
}

impl Mul for ComplexApprox {
    type Output = ComplexApprox;

    fn mul(self, rhs: ComplexApprox) -> ComplexApprox {
        let re = self.re * rhs.re - self.im * rhs.im;
        let im = self.re * rhs.im + self.im * rhs.re;
        let (a, b) = (self.abs(), rhs.abs());
        let propagated = a * rhs.err + b * self.err + self.err * rhs.err;
        let rounding = 4.0 * EPS * a * b;
        ComplexApprox { re, im, err: (propagated + rounding) * (1.0 + 4.0 * EPS) }
    }
}
