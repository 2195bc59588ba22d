//! Comparison of both sides of the trace formula, and the adelic Poisson
//! summation check `Σ_{q∈Q} φ(q) = Σ_{q∈Q} φ̂(q)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::arch::ArchFunction;
use crate::exact::{ComplexApprox, Rational};
use crate::geometric::{geometric_report, GeometricReport};
use crate::hecke::HeckeElement;
use crate::localsb::LocalSb;
use crate::numeric::{check_tol, BoundedValue, Truncation};
use crate::padic::{vp, Prime};
use crate::spectral::{lattice_denominator, spectral_report, SpectralReport};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn judge(residual: f64, bound: f64, tol: f64) -> Verdict {
        if residual.is_finite() && bound.is_finite() && residual <= bound + tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Both sides of the trace formula and their comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceCheck {
    pub spectral: SpectralReport,
    pub geometric: GeometricReport,
    pub residual: f64,
    pub certified_bound: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

pub fn verify_trace_formula(h: &HeckeElement, tol: f64) -> Result<TraceCheck, Error> {
    verify_trace_formula_truncated(h, &Truncation::new(tol)?)
}

pub fn verify_trace_formula_truncated(h: &HeckeElement, trunc: &Truncation) -> Result<TraceCheck, Error> {
    check_tol(trunc.tol)?;
    let spectral = spectral_report(h, trunc, None)?;
    let geometric = geometric_report(h, trunc)?;
    let residual = spectral.total.distance(&geometric.total);
    let certified_bound = spectral.total.bound + geometric.total.bound;
    let verdict = Verdict::judge(residual, certified_bound, trunc.tol);
    Ok(TraceCheck { spectral, geometric, residual, certified_bound, tol: trunc.tol, verdict })
}

/// A factorizable Schwartz-Bruhat function `φ = ⊗_p φ_p ⊗ φ_∞` on `A`,
/// with `φ_p = 1_{Z_p}` at unlisted primes.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonInput {
    locals: BTreeMap<Prime, LocalSb>,
    pub arch: ArchFunction,
}

impl PoissonInput {
    pub fn new<I>(locals: I, arch: ArchFunction) -> Result<Self, Error>
    where
        I: IntoIterator<Item = LocalSb>,
    {
        let mut map = BTreeMap::new();
        for f in locals {
            let p = f.p();
            if map.contains_key(&p) {
                return Err(Error::Numeric(alloc::format!("duplicate local factor at p = {p}")));
            }
            if !f.is_unit_ball() {
                map.insert(p, f);
            }
        }
        Ok(PoissonInput { locals: map, arch })
    }

    /// `1_Ẑ ⊗ e^{−πx²}`.
    pub fn standard() -> Self {
        PoissonInput { locals: BTreeMap::new(), arch: ArchFunction::standard() }
    }

    pub fn locals(&self) -> impl Iterator<Item = &LocalSb> {
        self.locals.values()
    }

    pub fn fourier(&self) -> Result<PoissonInput, Error> {
        let mut locals = BTreeMap::new();
        for (p, f) in &self.locals {
            locals.insert(*p, f.fourier()?);
        }
        Ok(PoissonInput { locals, arch: self.arch.fourier() })
    }

    /// `Σ_{q∈Q} φ(q)`, over the lattice `(1/D)Z` that contains the support.
    pub fn rational_sum(&self, trunc: &Truncation) -> Result<BoundedValue, Error> {
        if self.locals.values().any(LocalSb::is_zero) {
            return Ok(BoundedValue::ZERO);
        }
        let mut locals: Vec<(Prime, LocalSb)> = self.locals.iter().map(|(p, f)| (*p, f.clone())).collect();
        let d = lattice_denominator(&mut locals, trunc)?;
        let weight_bound: f64 = locals.iter().map(|(_, f)| f.sup_bound()).product();
        let factors: Vec<(&LocalSb, u64)> = locals
            .iter()
            .map(|(p, f)| {
                let s = vp(&Rational::from_integer(BigInt::from(d)), *p).unwrap_or(0) as u32;
                let modulus = p
                    .get()
                    .checked_pow(s + f.conductor_level())
                    .ok_or_else(|| Error::Numeric("cache modulus overflow".into()))?;
                Ok((f, modulus))
            })
            .collect::<Result<_, Error>>()?;
        let mut cache: Vec<BTreeMap<u64, ComplexApprox>> = alloc::vec![BTreeMap::new(); factors.len()];
        self.arch.weighted_lattice_sum(d, trunc, weight_bound, |m| {
            let q = Rational::new(BigInt::from(m), BigInt::from(d));
            let mut w = ComplexApprox::exact(num_complex::Complex64::new(1.0, 0.0));
            for (i, (f, modulus)) in factors.iter().enumerate() {
                let key = m.rem_euclid(*modulus as i64) as u64;
                let v = match cache[i].get(&key) {
                    Some(v) => *v,
                    None => {
                        let v = f.eval(&q)?.eval();
                        cache[i].insert(key, v);
                        v
                    }
                };
                if v.re == 0.0 && v.im == 0.0 && v.err == 0.0 {
                    return Ok(None);
                }
                w = w * v;
            }
            Ok(Some((w.value(), w.err)))
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonReport {
    pub lhs: BoundedValue,
    pub rhs: BoundedValue,
    pub residual: f64,
    pub bound: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

pub fn poisson_check(phi: &PoissonInput, tol: f64) -> Result<PoissonReport, Error> {
    poisson_check_truncated(phi, &Truncation::new(tol)?)
}

pub fn poisson_check_truncated(phi: &PoissonInput, trunc: &Truncation) -> Result<PoissonReport, Error> {
    check_tol(trunc.tol)?;
    let lhs = phi.rational_sum(trunc)?;
    let rhs = phi.fourier()?.rational_sum(trunc)?;
    let residual = lhs.distance(&rhs);
    let bound = lhs.bound + rhs.bound;
    Ok(PoissonReport { lhs, rhs, residual, bound, tol: trunc.tol, verdict: Verdict::judge(residual, bound, trunc.tol) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::integer;
    use crate::padic::PadicBall;

    fn two_adic_half() -> LocalSb {
        let p = Prime::new(2).unwrap();
        LocalSb::indicator(&PadicBall::new(p, integer(0), 1)).unwrap()
    }

    #[test]
    fn verdict_rule() {
        assert!(Verdict::judge(1.0, 0.5, 0.5).passed());
        assert!(!Verdict::judge(1.0, 0.5, 0.25).passed());
        assert!(!Verdict::judge(f64::NAN, 1.0, 1.0).passed());
        assert!(!Verdict::judge(0.0, f64::INFINITY, 1.0).passed());
    }

    #[test]
    fn standard_theta_identity() {
        let r = poisson_check(&PoissonInput::standard(), 1e-12).unwrap();
        assert!((r.lhs.value.re - 1.0864348112).abs() < 1e-10);
        assert!(r.verdict.passed());
    }

    #[test]
    fn two_adic_fixture() {
        let phi = PoissonInput::new([two_adic_half()], ArchFunction::standard()).unwrap();
        let r = poisson_check(&phi, 1e-12).unwrap();
        let direct: f64 = (-5i32..=5).map(|n| libm::exp(-core::f64::consts::PI * (4 * n * n) as f64)).sum();
        assert!((r.lhs.value.re - direct).abs() < 1e-12);
        assert!((r.rhs.value.re - direct).abs() < 1e-11);
        assert!((r.lhs.value.re - 1.0000070).abs() < 1e-7);
        assert!(r.verdict.passed());
    }

    #[test]
    fn zero_function() {
        let p = Prime::new(3).unwrap();
        let phi = PoissonInput::new([LocalSb::zero(p)], ArchFunction::standard()).unwrap();
        let r = poisson_check(&phi, 1e-9).unwrap();
        assert_eq!(r.lhs, BoundedValue::ZERO);
        assert_eq!(r.rhs, BoundedValue::ZERO);
    }

    #[test]
    fn trace_formula_examples() {
        let r = verify_trace_formula(&HeckeElement::standard(), 1e-12).unwrap();
        assert!(r.residual < 1e-10);
        assert!((r.spectral.total.value.re - 1.0864348112).abs() < 1e-10);
        assert!(r.verdict.passed());
    }
}
