//! The real place: Gaussian atoms `amp·e^{−πa(x−μ)²}·e^{2πiξx}`.
//!
//! The Fourier transform uses the real component of the global character,
//! `f̂(y) = ∫ f(x)·e^{−2πixy} dx`, under which an atom maps to an atom:
//!
//! ```text
//! (amp, a, μ, ξ)  ↦  (amp·a^{−1/2}·e^{2πiμξ}, 1/a, ξ, −μ)
//! ```
//!
//! # Tail bound for lattice sums
//!
//! For `g(t) = e^{−πa(t−μ)²}` and `M > |μ|`, `g` is decreasing on `[M, ∞)`
//! and each lattice point `q > M` of `(1/D)Z` satisfies
//! `g(q) ≤ D·∫_{q−1/D}^{q} g`. Summing and using the Mills-ratio estimate
//! `∫_X^∞ e^{−πat²} dt ≤ e^{−πaX²}/(2πaX)` on both tails gives
//!
//! ```text
//! Σ_{q ∈ (1/D)Z, |q| > M} |g(q)| ≤ D·e^{−πa(M−|μ|)²} / (πa(M−|μ|)),
//! ```
//!
//! which is summed over atoms with their `|amp|`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::numeric::{check_tol, BoundedValue, SumAccumulator, Truncation, EPS};
use crate::Error;

/// `x ↦ amp·e^{−π·width·(x−shift)²}·e^{2πi·modulation·x}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArchAtom {
    pub amp: Complex64,
    pub width: f64,
    pub shift: f64,
    pub modulation: f64,
}

/// `(cos 2πt, sin 2πt)` after removing the integer part of `t` exactly.
fn cis_turns(t: f64) -> Complex64 {
    let r = t - libm::round(t);
    let (s, c) = libm::sincos(2.0 * PI * r);
    Complex64::new(c, s)
}

impl ArchAtom {
    pub fn new(amp: Complex64, width: f64, shift: f64, modulation: f64) -> Result<Self, Error> {
        let atom = ArchAtom { amp, width, shift, modulation };
        atom.validate()?;
        Ok(atom)
    }

    /// `e^{−πx²}`.
    pub fn standard() -> Self {
        ArchAtom { amp: Complex64::new(1.0, 0.0), width: 1.0, shift: 0.0, modulation: 0.0 }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let finite = [self.amp.re, self.amp.im, self.width, self.shift, self.modulation]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::BadArchAtom(alloc::format!("non-finite field in {self:?}")));
        }
        if self.width <= 0.0 {
            return Err(Error::BadArchAtom(alloc::format!("width must be positive, got {}", self.width)));
        }
        Ok(())
    }

    /// Value and a rounding radius for it.
    pub fn eval_with_err(&self, x: f64) -> (Complex64, f64) {
        let d = x - self.shift;
        let expo = PI * self.width * d * d;
        let g = libm::exp(-expo);
        let phase_arg = self.modulation * x;
        let v = self.amp * cis_turns(phase_arg) * g;
        let rel = EPS * (16.0 + 4.0 * expo + 8.0 * PI * phase_arg.abs() + 4.0 * (x.abs() / (d.abs() + 1.0)) * expo);
        (v, self.amp.norm() * g * rel)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_with_err(x).0
    }

    pub fn fourier(&self) -> ArchAtom {
        let scale = 1.0 / libm::sqrt(self.width);
        ArchAtom {
            amp: self.amp * cis_turns(self.shift * self.modulation) * scale,
            width: 1.0 / self.width,
            shift: self.modulation,
            modulation: -self.shift,
        }
    }

    /// `∫_R f(x) dx = f̂(0)`.
    pub fn integral(&self) -> Complex64 {
        self.fourier().eval(0.0)
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> ArchAtom {
        ArchAtom { amp: self.amp, width: self.width, shift: -self.shift, modulation: -self.modulation }
    }

    /// Bound for `Σ_{q∈(1/D)Z, |q|>M} |f(q)|`; infinite when `M ≤ |μ|`.
    pub fn tail_bound(&self, cutoff: f64, denominator: u64) -> f64 {
        let gap = cutoff - self.shift.abs();
        if self.amp == Complex64::new(0.0, 0.0) {
            return 0.0;
        }
        if gap <= 0.0 {
            return f64::INFINITY;
        }
        let t = PI * self.width * gap;
        let b = denominator as f64 * self.amp.norm() * libm::exp(-t * gap) / t;
        b * (1.0 + 16.0 * EPS)
    }
}

/// A finite sum of [`ArchAtom`]s.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArchFunction {
    atoms: Vec<ArchAtom>,
}

impl ArchFunction {
    pub fn new(atoms: Vec<ArchAtom>) -> Result<Self, Error> {
        for a in &atoms {
            a.validate()?;
        }
        Ok(ArchFunction { atoms })
    }

    pub fn zero() -> Self {
        ArchFunction { atoms: Vec::new() }
    }

    pub fn standard() -> Self {
        ArchFunction { atoms: alloc::vec![ArchAtom::standard()] }
    }

    pub fn atoms(&self) -> &[ArchAtom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.amp == Complex64::new(0.0, 0.0))
    }

    pub fn is_standard(&self) -> bool {
        self.atoms == [ArchAtom::standard()]
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.atoms.iter().map(|a| a.eval(x)).sum()
    }

    pub fn eval_with_err(&self, x: f64) -> (Complex64, f64) {
        let mut acc = SumAccumulator::new();
        for a in &self.atoms {
            let (v, e) = a.eval_with_err(x);
            acc.push(v, e);
        }
        let b = acc.finish();
        (b.value, b.bound)
    }

    pub fn fourier(&self) -> ArchFunction {
        ArchFunction { atoms: self.atoms.iter().map(ArchAtom::fourier).collect() }
    }

    pub fn reflect(&self) -> ArchFunction {
        ArchFunction { atoms: self.atoms.iter().map(ArchAtom::reflect).collect() }
    }

    pub fn integral(&self) -> Complex64 {
        self.integral_bounded().value
    }

    /// The integral with its rounding radius.
    pub fn integral_bounded(&self) -> BoundedValue {
        let mut acc = SumAccumulator::new();
        for a in &self.atoms {
            let (v, e) = a.fourier().eval_with_err(0.0);
            acc.push(v, e + 8.0 * EPS * v.norm());
        }
        acc.finish()
    }

    /// Multiply every amplitude by `c`.
    pub fn scale(&self, c: Complex64) -> ArchFunction {
        ArchFunction { atoms: self.atoms.iter().map(|a| ArchAtom { amp: a.amp * c, ..*a }).collect() }
    }

    pub fn add(&self, other: &ArchFunction) -> ArchFunction {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        ArchFunction { atoms }
    }

    pub fn tail_bound(&self, cutoff: f64, denominator: u64) -> f64 {
        self.atoms.iter().map(|a| a.tail_bound(cutoff, denominator)).sum()
    }

    /// Smallest `K ≥ 0` such that the tail beyond `M = K/D` is at most `tol`.
    pub fn cutoff(&self, denominator: u64, tol: f64) -> u64 {
        if self.is_zero() {
            return 0;
        }
        let d = denominator as f64;
        let max_shift = self.atoms.iter().map(|a| a.shift.abs()).fold(0.0, f64::max);
        let mut k = libm::floor(max_shift * d) as u64 + 1;
        if self.tail_bound(k as f64 / d, denominator) <= tol {
            return k;
        }
        let mut step = 1u64;
        while self.tail_bound((k + step) as f64 / d, denominator) > tol {
            k += step;
            step *= 2;
        }
        // invariant: bound(k) > tol ≥ bound(k + step)
        let (mut lo, mut hi) = (k, k + step);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail_bound(mid as f64 / d, denominator) <= tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `Σ_{q ∈ (1/D)Z} f(q)` with a certified tail bound at most `tol`.
    pub fn lattice_sum(&self, denominator: u64, tol: f64) -> Result<BoundedValue, Error> {
        self.lattice_sum_truncated(denominator, &Truncation::new(tol)?)
    }

    pub fn lattice_sum_truncated(&self, denominator: u64, trunc: &Truncation) -> Result<BoundedValue, Error> {
        self.weighted_lattice_sum(denominator, trunc, 1.0, |_| Ok(Some((Complex64::new(1.0, 0.0), 0.0))))
    }

    /// `Σ_{m ∈ Z} w(m)·f(m/D)` where `|w| ≤ weight_bound` everywhere.
    ///
    /// `weight(m)` returns the weight with its error radius, or `None` where
    /// it vanishes. The cutoff is multiplied by the truncation's
    /// `cutoff_scale`; terms are added in ascending `m`.
    pub fn weighted_lattice_sum<W>(
        &self,
        denominator: u64,
        trunc: &Truncation,
        weight_bound: f64,
        mut weight: W,
    ) -> Result<BoundedValue, Error>
    where
        W: FnMut(i64) -> Result<Option<(Complex64, f64)>, Error>,
    {
        check_tol(trunc.tol)?;
        if denominator == 0 {
            return Err(Error::ZeroScale);
        }
        if self.is_zero() || weight_bound == 0.0 {
            return Ok(BoundedValue::ZERO);
        }
        let d = denominator;
        let k = self.cutoff(d, trunc.tol / weight_bound) * trunc.cutoff_scale.max(1) as u64;
        let k = i64::try_from(k).map_err(|_| Error::Numeric(alloc::format!("lattice cutoff {k} too large")))?;
        let mut acc = SumAccumulator::new();
        for m in -k..=k {
            let Some((w, w_err)) = weight(m)? else { continue };
            let (f, f_err) = self.eval_with_err(m as f64 / d as f64);
            let term = w * f;
            let err = w.norm() * f_err + w_err * (f.norm() + f_err) + 4.0 * EPS * term.norm();
            acc.push(term, err);
        }
        let mut out = acc.finish();
        out.bound += weight_bound * self.tail_bound(k as f64 / d as f64, d);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Composite Simpson rule on `[lo, hi]`, used as an independent oracle.
    fn simpson<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: f64, n: usize) -> Complex64 {
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += f(lo + i as f64 * h) * w;
        }
        s * (h / 3.0)
    }

    fn quad_fourier(f: &ArchFunction, y: f64) -> Complex64 {
        simpson(|x| f.eval(x) * cis_turns(-x * y), -12.0, 12.0, 24_000)
    }

    #[test]
    fn eval_examples() {
        let g = ArchFunction::standard();
        assert_eq!(g.eval(0.0), c(1.0, 0.0));
        assert!((g.eval(1.0).re - 0.0432139).abs() < 1e-7);
        assert_eq!(ArchFunction::zero().eval(0.3), c(0.0, 0.0));
    }

    #[test]
    fn fourier_examples_against_quadrature() {
        let g = ArchFunction::standard();
        let narrow = ArchFunction::new(alloc::vec![ArchAtom::new(c(1.0, 0.0), 4.0, 0.0, 0.0).unwrap()]).unwrap();
        let shifted = ArchFunction::new(alloc::vec![ArchAtom::new(c(1.0, 0.0), 1.0, 1.0, 0.0).unwrap()]).unwrap();
        for y in [0.0, 0.5, 1.0] {
            let gauss = libm::exp(-PI * y * y);
            assert!((g.fourier().eval(y) - c(gauss, 0.0)).norm() < 1e-14);
            assert!((quad_fourier(&g, y) - c(gauss, 0.0)).norm() < 1e-10);

            let expect = c(0.5 * libm::exp(-PI * y * y / 4.0), 0.0);
            assert!((narrow.fourier().eval(y) - expect).norm() < 1e-14);
            assert!((quad_fourier(&narrow, y) - expect).norm() < 1e-10);

            let expect = cis_turns(-y) * gauss;
            assert!((shifted.fourier().eval(y) - expect).norm() < 1e-14);
            assert!((quad_fourier(&shifted, y) - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn integral_examples() {
        assert!((ArchFunction::standard().integral() - c(1.0, 0.0)).norm() < 1e-15);
        let wide = ArchFunction::new(alloc::vec![ArchAtom::new(c(1.0, 0.0), 0.25, 0.0, 0.0).unwrap()]).unwrap();
        assert!((wide.integral() - c(2.0, 0.0)).norm() < 1e-14);
        let modulated = ArchFunction::new(alloc::vec![ArchAtom::new(c(1.0, 0.0), 1.0, 0.0, 1.0).unwrap()]).unwrap();
        assert!((modulated.integral() - c(libm::exp(-PI), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lattice_sum_examples() {
        let g = ArchFunction::standard();
        let direct: f64 = (-6i32..=6).map(|n| libm::exp(-PI * (n * n) as f64)).sum();
        let s = g.lattice_sum(1, 1e-12).unwrap();
        assert!((s.value.re - 1.0864348112).abs() < 1e-10);
        assert!((s.value.re - direct).abs() <= s.bound + 1e-15);
        assert!(s.bound <= 1.1e-12);

        let s2 = g.lattice_sum(2, 1e-10).unwrap();
        let cross = 2.0 * (1.0 + 2.0 * libm::exp(-4.0 * PI));
        assert!((s2.value.re - 2.0000139).abs() < 1e-7);
        assert!((s2.value.re - cross).abs() < 1e-10);

        let z = ArchFunction::zero().lattice_sum(3, 1e-9).unwrap();
        assert_eq!(z, BoundedValue::ZERO);
        assert!(g.lattice_sum(1, 0.0).is_err());
    }

    #[test]
    fn doubling_the_cutoff_stays_inside_the_bound() {
        let f = ArchFunction::new(alloc::vec![
            ArchAtom::new(c(0.7, -0.2), 0.5, 1.3, 0.4).unwrap(),
            ArchAtom::new(c(-1.1, 0.3), 2.0, -0.6, -1.7).unwrap(),
        ])
        .unwrap();
        for d in [1u64, 2, 6] {
            for tol in [1e-3, 1e-8, 1e-12] {
                let t = Truncation::new(tol).unwrap();
                let base = f.lattice_sum_truncated(d, &t).unwrap();
                let big = f.lattice_sum_truncated(d, &Truncation { cutoff_scale: 2, ..t }).unwrap();
                assert!(base.distance(&big) <= base.bound, "d={d} tol={tol}");
            }
        }
    }

    #[test]
    fn cutoff_is_minimal() {
        let f = ArchFunction::standard();
        let k = f.cutoff(1, 1e-12);
        assert!(f.tail_bound(k as f64, 1) <= 1e-12);
        assert!(f.tail_bound((k - 1) as f64, 1) > 1e-12);
    }
}
