//! Geometric side: orbital integrals over the three kinds of conjugacy
//! classes of `Γ = Q^× ⋉ Q`.
//!
//! * identity `(1, 0)`: `h(1)`;
//! * additive class `{(1, x) : x ∈ Q^×}`: `∫_{A¹} h(1, a) d^×a`;
//! * hyperbolic classes `α ∈ Q^× ∖ {1}`: `∫_A h(α, x) dx`.
//!
//! For hyperbolic classes the conjugation `x ↦ x(1−α)` would contribute
//! `|1−α|_A^{−1}`, which is `1` by the product formula, so the summand is the
//! plain additive integral.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::exact::Rational;
use crate::hecke::{GroupPoint, HeckeAtom, HeckeElement};
use crate::numeric::{BoundedValue, Truncation};
use crate::spectral::{assemble, unfolded_sum};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricReport {
    pub identity_term: BoundedValue,
    pub additive_term: BoundedValue,
    /// `(α, ∫_A h(α, x) dx)`, ascending in `α`.
    pub hyperbolic_terms: Vec<(Rational, BoundedValue)>,
    pub total: BoundedValue,
}

/// `h(1, 0)`.
pub fn term_identity(h: &HeckeElement) -> Result<BoundedValue, Error> {
    h.eval_bounded(&GroupPoint::identity())
}

/// `∫_{A¹} h(1, a) d^×a`, unfolded as a sum over `Q^×`.
pub fn term_additive(h: &HeckeElement, tol: f64) -> Result<BoundedValue, Error> {
    term_additive_truncated(h, &Truncation::new(tol)?)
}

pub fn term_additive_truncated(h: &HeckeElement, trunc: &Truncation) -> Result<BoundedValue, Error> {
    let atoms: Vec<HeckeAtom> = h.at_identity_class().cloned().collect();
    unfolded_sum(&atoms, &Rational::from_integer(BigInt::from(1)), trunc)
}

/// One entry per `α ≠ 1` in the `q`-support.
pub fn term_hyperbolic(h: &HeckeElement) -> Result<Vec<(Rational, BoundedValue)>, Error> {
    let one = Rational::from_integer(BigInt::from(1));
    let mut classes: BTreeMap<Rational, BoundedValue> = BTreeMap::new();
    for atom in h.atoms().iter().filter(|a| *a.q() != one) {
        let finite = atom.unit_at_one()?.checked_mul(&atom.additive_integral()?)?;
        let v = assemble(atom.coeff, &finite, atom.arch.integral_bounded());
        let slot = classes.entry(atom.q().clone()).or_insert(BoundedValue::ZERO);
        *slot = *slot + v;
    }
    Ok(classes.into_iter().collect())
}

pub fn geometric_total(h: &HeckeElement, tol: f64) -> Result<GeometricReport, Error> {
    geometric_report(h, &Truncation::new(tol)?)
}

pub fn geometric_report(h: &HeckeElement, trunc: &Truncation) -> Result<GeometricReport, Error> {
    let identity_term = term_identity(h)?;
    let additive_term = term_additive_truncated(h, trunc)?;
    let hyperbolic_terms = term_hyperbolic(h)?;
    let total = hyperbolic_terms.iter().fold(identity_term + additive_term, |acc, (_, v)| acc + *v);
    Ok(GeometricReport { identity_term, additive_term, hyperbolic_terms, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{ArchAtom, ArchFunction};
    use crate::exact::{integer, rational, Cyclotomic};
    use alloc::vec::Vec;
    use crate::hecke::LocalFactor;
    use crate::localsb::{LocalSb, UnitFunction};
    use crate::padic::{PadicBall, Prime};
    use core::f64::consts::PI;
    use num_complex::Complex64;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn single(q: Rational, locals: Vec<LocalFactor>, arch: ArchFunction) -> HeckeElement {
        HeckeElement::new(alloc::vec![HeckeAtom::new(one(), q, locals, arch).unwrap()])
    }

    fn additive_factor(p: u64, c: Rational, n: i64) -> LocalFactor {
        let p = Prime::new(p).unwrap();
        LocalFactor::new(UnitFunction::one(p), LocalSb::indicator(&PadicBall::new(p, c, n)).unwrap()).unwrap()
    }

    #[test]
    fn identity_examples() {
        assert_eq!(term_identity(&HeckeElement::standard()).unwrap().value, one());
        let shifted = ArchFunction::new(alloc::vec![ArchAtom::new(one(), 1.0, 1.0, 0.0).unwrap()]).unwrap();
        let t = term_identity(&single(integer(1), alloc::vec![], shifted)).unwrap();
        assert!((t.value.re - libm::exp(-PI)).abs() < 1e-15);
        let t = term_identity(&single(integer(2), alloc::vec![], ArchFunction::standard())).unwrap();
        assert_eq!(t, BoundedValue::ZERO);
    }

    #[test]
    fn additive_examples() {
        let t = term_additive(&HeckeElement::standard(), 1e-12).unwrap();
        assert!((t.value.re - 0.0864348112).abs() < 1e-10);
        let h = single(integer(1), alloc::vec![additive_factor(2, integer(0), 1)], ArchFunction::standard());
        let t = term_additive(&h, 1e-14).unwrap();
        let direct = 2.0 * (libm::exp(-4.0 * PI) + libm::exp(-16.0 * PI));
        assert!((t.value.re - direct).abs() <= t.bound + 1e-18);
        assert!((t.value.re - 6.9747e-6).abs() < 1e-9);
        let t = term_additive(&single(integer(2), alloc::vec![], ArchFunction::standard()), 1e-9).unwrap();
        assert_eq!(t, BoundedValue::ZERO);
    }

    #[test]
    fn hyperbolic_examples() {
        assert!(term_hyperbolic(&HeckeElement::standard()).unwrap().is_empty());
        let t = term_hyperbolic(&single(integer(2), alloc::vec![], ArchFunction::standard())).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, integer(2));
        assert!((t[0].1.value - one()).norm() < 1e-15);
        let h = single(rational(1, 3), alloc::vec![additive_factor(3, integer(0), 2)], ArchFunction::standard());
        let t = term_hyperbolic(&h).unwrap();
        assert_eq!(t[0].0, rational(1, 3));
        assert!((t[0].1.value.re - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn totals() {
        let r = geometric_total(&HeckeElement::standard(), 1e-12).unwrap();
        assert!((r.total.value.re - 1.0864348112).abs() < 1e-10);
        let r = geometric_total(&single(integer(2), alloc::vec![], ArchFunction::standard()), 1e-12).unwrap();
        assert!((r.total.value - one()).norm() < 1e-15);
        let r = geometric_total(&HeckeElement::zero(), 1e-12).unwrap();
        assert_eq!(r.total, BoundedValue::ZERO);
    }

    #[test]
    fn integral_support_gives_the_integer_lattice_sum() {
        let arch = ArchFunction::new(alloc::vec![ArchAtom::new(Complex64::new(0.3, 0.1), 0.7, 0.4, 0.25).unwrap()]).unwrap();
        let g = UnitFunction::constant(Prime::new(5).unwrap(), Cyclotomic::one());
        let f = LocalFactor::new(g, LocalSb::unit_ball(Prime::new(5).unwrap())).unwrap();
        let h = single(integer(1), alloc::vec![f], arch.clone());
        let r = geometric_total(&h, 1e-12).unwrap();
        let lattice = arch.lattice_sum(1, 1e-12).unwrap();
        assert!(r.total.agrees_with(&lattice));
    }

    /// `∫_A h(α, x) dx` by coset sampling: the local integral at p is the sum
    /// of `f_p` over representatives of `p^{-2}Z_p / p^2 Z_p` times `p^{-2}`.
    #[test]
    fn hyperbolic_term_matches_coset_sampling() {
        let p = Prime::new(3).unwrap();
        let f = additive_factor(3, rational(1, 3), 1);
        let arch = ArchFunction::standard();
        let h = single(rational(-2, 3), alloc::vec![f.clone()], arch.clone());
        let mut sampled = Complex64::new(0.0, 0.0);
        for j in 0..81i64 {
            let x = rational(j - 40, 9);
            let pt = GroupPoint::new(rational(-2, 3), integer(0), 0.0).unwrap().with_x(p, x);
            sampled += h.eval(&pt).unwrap() / 9.0;
        }
        // arch(0) = 1, so rescale the real coordinate by its integral
        let sampled = sampled * arch.integral();
        let t = term_hyperbolic(&h).unwrap();
        assert!((t[0].1.value - sampled).norm() < 1e-15);
        assert!((t[0].1.value.re - 1.0 / 3.0).abs() < 1e-15);
    }
}
