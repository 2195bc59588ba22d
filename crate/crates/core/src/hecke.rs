//! Factorizable test functions on `G = A¹ ⋉ A`.
//!
//! An atom is `h(q'·u, x) = [q' = q]·coeff·∏_p unit_p(u_p)·additive_p(x_p)·arch(x_∞)`
//! with `u ∈ Ẑ^×`. Primes without an explicit [`LocalFactor`] carry the
//! default `1_{Z_p^×} ⊗ 1_{Z_p}`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::arch::ArchFunction;
use crate::exact::{factor_u64, rational_to_f64, Cyclotomic, Rational};
use crate::localsb::{LocalSb, UnitFunction};
use crate::numeric::BoundedValue;
use crate::padic::{vp, Prime};
use crate::Error;

/// `f_p(u, y) = unit(u)·additive(y)` at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalFactor {
    p: Prime,
    pub unit: UnitFunction,
    pub additive: LocalSb,
}

impl LocalFactor {
    pub fn new(unit: UnitFunction, additive: LocalSb) -> Result<Self, Error> {
        if unit.p() != additive.p() {
            return Err(Error::PlaceMismatch { expected: unit.p().get(), found: additive.p().get() });
        }
        Ok(LocalFactor { p: unit.p(), unit, additive })
    }

    pub fn default_at(p: Prime) -> Self {
        LocalFactor { p, unit: UnitFunction::one(p), additive: LocalSb::unit_ball(p) }
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn is_default(&self) -> bool {
        self.unit.is_one() && self.additive.is_unit_ball()
    }

    pub fn eval(&self, u: &Rational, x: &Rational) -> Result<Cyclotomic, Error> {
        let uv = self.unit.eval(u);
        if uv.is_zero() {
            return Ok(uv);
        }
        uv.checked_mul(&self.additive.eval(x)?)
    }

    pub fn fourier(&self) -> Result<LocalFactor, Error> {
        Ok(LocalFactor { p: self.p, unit: self.unit.clone(), additive: self.additive.fourier()? })
    }
}

/// One factorizable atom, supported on `q·Ẑ^× × A`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeAtom {
    pub coeff: Complex64,
    q: Rational,
    locals: BTreeMap<Prime, LocalFactor>,
    pub arch: ArchFunction,
}

impl HeckeAtom {
    /// Builds an atom; default local factors are dropped.
    pub fn new<I>(coeff: Complex64, q: Rational, locals: I, arch: ArchFunction) -> Result<Self, Error>
    where
        I: IntoIterator<Item = LocalFactor>,
    {
        if q.is_zero() {
            return Err(Error::ZeroScale);
        }
        if !(coeff.re.is_finite() && coeff.im.is_finite()) {
            return Err(Error::Numeric(alloc::format!("non-finite coefficient {coeff}")));
        }
        let mut map = BTreeMap::new();
        for f in locals {
            let p = f.p();
            if map.contains_key(&p) {
                return Err(Error::Numeric(alloc::format!("duplicate local factor at p = {p}")));
            }
            if !f.is_default() {
                map.insert(p, f);
            }
        }
        Ok(HeckeAtom { coeff, q, locals: map, arch })
    }

    /// `q = 1`, default factors everywhere, standard Gaussian.
    pub fn standard() -> Self {
        HeckeAtom {
            coeff: Complex64::new(1.0, 0.0),
            q: Rational::from_integer(BigInt::from(1)),
            locals: BTreeMap::new(),
            arch: ArchFunction::standard(),
        }
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    /// Non-default local factors, ascending by prime.
    pub fn locals(&self) -> impl Iterator<Item = &LocalFactor> {
        self.locals.values()
    }

    pub fn local(&self, p: Prime) -> LocalFactor {
        self.locals.get(&p).cloned().unwrap_or_else(|| LocalFactor::default_at(p))
    }

    pub fn primes(&self) -> impl Iterator<Item = Prime> + '_ {
        self.locals.keys().copied()
    }

    /// `∏_p unit_p(1)`, exact.
    pub fn unit_at_one(&self) -> Result<Cyclotomic, Error> {
        let one = Rational::from_integer(BigInt::from(1));
        let mut acc = Cyclotomic::one();
        for f in self.locals.values() {
            acc = acc.checked_mul(&f.unit.eval(&one))?;
        }
        Ok(acc)
    }

    /// `∏_p ∫ additive_p`, exact.
    pub fn additive_integral(&self) -> Result<Cyclotomic, Error> {
        let mut acc = Cyclotomic::one();
        for f in self.locals.values() {
            acc = acc.checked_mul(&f.additive.integral())?;
        }
        Ok(acc)
    }

    pub fn fourier(&self) -> Result<HeckeAtom, Error> {
        let mut locals = BTreeMap::new();
        for (p, f) in &self.locals {
            locals.insert(*p, f.fourier()?);
        }
        Ok(HeckeAtom { coeff: self.coeff, q: self.q.clone(), locals, arch: self.arch.fourier() })
    }

    /// `x ↦ h(a, −x)` in the additive slot at every place.
    pub fn reflect_additive(&self) -> Result<HeckeAtom, Error> {
        let mut locals = BTreeMap::new();
        for (p, f) in &self.locals {
            let g = LocalFactor { p: *p, unit: f.unit.clone(), additive: f.additive.reflect()? };
            locals.insert(*p, g);
        }
        Ok(HeckeAtom { coeff: self.coeff, q: self.q.clone(), locals, arch: self.arch.reflect() })
    }

    /// `h_atom` at a point, with a rounding radius.
    pub fn eval(&self, pt: &GroupPoint) -> Result<BoundedValue, Error> {
        if pt.q != self.q {
            return Ok(BoundedValue::ZERO);
        }
        let mut primes: BTreeSet<Prime> = self.locals.keys().copied().collect();
        primes.extend(pt.unit_corrections.keys().copied());
        primes.extend(pt.x_corrections.keys().copied());
        for (p, _) in factor_u64(denominator_u64(&pt.x_rational)?) {
            primes.insert(Prime::new(p)?);
        }
        let mut finite = Cyclotomic::one();
        for p in primes {
            let u = pt.unit_at(p);
            let x = pt.x_at(p);
            let v = match self.locals.get(&p) {
                Some(f) => f.eval(&u, &x)?,
                None => LocalFactor::default_at(p).eval(&u, &x)?,
            };
            finite = finite.checked_mul(&v)?;
            if finite.is_zero() {
                return Ok(BoundedValue::ZERO);
            }
        }
        let fin = BoundedValue::from(finite.eval());
        let (a, a_err) = self.arch.eval_with_err(pt.x_inf);
        Ok(fin.scale(self.coeff * a, self.coeff.norm() * a_err))
    }
}

fn denominator_u64(x: &Rational) -> Result<u64, Error> {
    x.denom()
        .to_u64()
        .ok_or_else(|| Error::Numeric(alloc::format!("denominator of {x} exceeds 64 bits")))
}

/// A finite sum of [`HeckeAtom`]s.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HeckeElement {
    atoms: Vec<HeckeAtom>,
}

impl HeckeElement {
    pub fn new(atoms: Vec<HeckeAtom>) -> Self {
        HeckeElement { atoms }
    }

    pub fn zero() -> Self {
        HeckeElement { atoms: Vec::new() }
    }

    /// The default test function `1_{Ẑ^×} ⊗ 1_{Ẑ} ⊗ e^{−πx²}` at `q = 1`.
    pub fn standard() -> Self {
        HeckeElement { atoms: alloc::vec![HeckeAtom::standard()] }
    }

    pub fn atoms(&self) -> &[HeckeAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Distinct `q` values carried by the atoms, ascending.
    pub fn q_support(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> = self.atoms.iter().map(|a| a.q.clone()).collect();
        set.into_iter().collect()
    }

    /// Primes with a non-default factor in some atom.
    pub fn primes(&self) -> BTreeSet<Prime> {
        self.atoms.iter().flat_map(|a| a.primes()).collect()
    }

    pub fn add(&self, other: &HeckeElement) -> HeckeElement {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        HeckeElement { atoms }
    }

    pub fn scale(&self, c: Complex64) -> HeckeElement {
        HeckeElement { atoms: self.atoms.iter().map(|a| HeckeAtom { coeff: a.coeff * c, ..a.clone() }).collect() }
    }

    /// The partial Fourier transform in the additive variable.
    pub fn fourier(&self) -> Result<HeckeElement, Error> {
        Ok(HeckeElement { atoms: self.atoms.iter().map(HeckeAtom::fourier).collect::<Result<_, _>>()? })
    }

    pub fn reflect_additive(&self) -> Result<HeckeElement, Error> {
        Ok(HeckeElement { atoms: self.atoms.iter().map(HeckeAtom::reflect_additive).collect::<Result<_, _>>()? })
    }

    /// Atoms with `q = 1`.
    pub fn at_identity_class(&self) -> impl Iterator<Item = &HeckeAtom> {
        self.atoms.iter().filter(|a| a.q == Rational::from_integer(BigInt::from(1)))
    }

    pub fn eval(&self, pt: &GroupPoint) -> Result<Complex64, Error> {
        Ok(self.eval_bounded(pt)?.value)
    }

    pub fn eval_bounded(&self, pt: &GroupPoint) -> Result<BoundedValue, Error> {
        let mut acc = BoundedValue::ZERO;
        for a in &self.atoms {
            acc = acc + a.eval(pt)?;
        }
        Ok(acc)
    }
}

/// `(q·u, x) ∈ G` with `u ∈ Ẑ^×` equal to 1 except at listed primes, and `x`
/// equal to `x_rational` at every finite place except listed corrections.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPoint {
    q: Rational,
    unit_corrections: BTreeMap<Prime, Rational>,
    x_rational: Rational,
    x_corrections: BTreeMap<Prime, Rational>,
    pub x_inf: f64,
}

impl GroupPoint {
    pub fn new(q: Rational, x_rational: Rational, x_inf: f64) -> Result<Self, Error> {
        if q.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(GroupPoint { q, unit_corrections: BTreeMap::new(), x_rational, x_corrections: BTreeMap::new(), x_inf })
    }

    /// The identity `(1, 0)`.
    pub fn identity() -> Self {
        GroupPoint {
            q: Rational::from_integer(BigInt::from(1)),
            unit_corrections: BTreeMap::new(),
            x_rational: Rational::zero(),
            x_corrections: BTreeMap::new(),
            x_inf: 0.0,
        }
    }

    /// A principal point `(q, x)` with `x` diagonal, real coordinate included.
    pub fn principal(q: Rational, x: Rational) -> Result<Self, Error> {
        let x_inf = rational_to_f64(&x);
        GroupPoint::new(q, x, x_inf)
    }

    pub fn with_unit(mut self, p: Prime, u: Rational) -> Result<Self, Error> {
        if vp(&u, p) != Some(0) {
            return Err(Error::NotAUnit { p: p.get(), value: u });
        }
        self.unit_corrections.insert(p, u);
        Ok(self)
    }

    pub fn with_x(mut self, p: Prime, x: Rational) -> Self {
        self.x_corrections.insert(p, x);
        self
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn unit_at(&self, p: Prime) -> Rational {
        self.unit_corrections.get(&p).cloned().unwrap_or_else(|| Rational::from_integer(BigInt::from(1)))
    }

    pub fn x_at(&self, p: Prime) -> Rational {
        self.x_corrections.get(&p).cloned().unwrap_or_else(|| self.x_rational.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};
    use crate::padic::PadicBall;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn additive_atom(p: u64, ball: PadicBall) -> HeckeAtom {
        let f = LocalFactor::new(UnitFunction::one(pr(p)), LocalSb::indicator(&ball).unwrap()).unwrap();
        HeckeAtom::new(Complex64::new(1.0, 0.0), integer(1), [f], ArchFunction::standard()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let h = HeckeElement::standard();
        assert_eq!(h.eval(&GroupPoint::identity()).unwrap(), Complex64::new(1.0, 0.0));
        let at2 = GroupPoint::new(integer(2), integer(0), 0.0).unwrap();
        assert_eq!(h.eval(&at2).unwrap(), Complex64::new(0.0, 0.0));
        let u3 = GroupPoint::identity().with_unit(pr(3), integer(2)).unwrap();
        assert_eq!(h.eval(&u3).unwrap(), Complex64::new(1.0, 0.0));
        assert!(GroupPoint::identity().with_unit(pr(3), integer(3)).is_err());
    }

    #[test]
    fn non_integral_x_is_outside_the_default_support() {
        let h = HeckeElement::standard();
        let pt = GroupPoint::principal(integer(1), rational(1, 5)).unwrap();
        assert_eq!(h.eval(&pt).unwrap(), Complex64::new(0.0, 0.0));
        let pt = GroupPoint::new(integer(1), rational(1, 5), 0.0).unwrap().with_x(pr(5), integer(0));
        assert_eq!(h.eval(&pt).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn fourier_examples() {
        let h = HeckeElement::standard();
        assert_eq!(h.fourier().unwrap(), h);
        let a = additive_atom(2, PadicBall::new(pr(2), integer(0), 1));
        let fa = a.fourier().unwrap();
        let expect = LocalSb::indicator(&PadicBall::new(pr(2), integer(0), -1))
            .unwrap()
            .scale(&Cyclotomic::from_rational(rational(1, 2)))
            .unwrap();
        assert_eq!(fa.local(pr(2)).additive, expect);
        assert!(HeckeElement::zero().fourier().unwrap().is_empty());
    }

    #[test]
    fn default_factors_are_dropped() {
        let a = HeckeAtom::new(
            Complex64::new(1.0, 0.0),
            integer(1),
            [LocalFactor::default_at(pr(7))],
            ArchFunction::standard(),
        )
        .unwrap();
        assert_eq!(a, HeckeAtom::standard());
        assert!(HeckeAtom::new(Complex64::new(1.0, 0.0), integer(0), [], ArchFunction::standard()).is_err());
    }

    #[test]
    fn double_fourier_reflects() {
        let f = LocalFactor::new(
            UnitFunction::from_atoms(pr(3), [(Cyclotomic::one(), PadicBall::new(pr(3), integer(2), 1))]).unwrap(),
            LocalSb::indicator(&PadicBall::new(pr(3), rational(1, 3), 1)).unwrap(),
        )
        .unwrap();
        let arch = ArchFunction::new(alloc::vec![crate::arch::ArchAtom::new(Complex64::new(0.5, 0.5), 1.5, 0.3, -0.7).unwrap()])
            .unwrap();
        let h = HeckeElement::new(alloc::vec![HeckeAtom::new(Complex64::new(2.0, 0.0), rational(1, 2), [f], arch).unwrap()]);
        let twice = h.fourier().unwrap().fourier().unwrap();
        let refl = h.reflect_additive().unwrap();
        for (a, b) in twice.atoms().iter().zip(refl.atoms()) {
            assert_eq!(a.locals().collect::<Vec<_>>(), b.locals().collect::<Vec<_>>());
            for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                assert!((a.arch.eval(x) - b.arch.eval(x)).norm() < 1e-12);
            }
        }
    }
}
