//! Traces of the constituents of `L²(Γ\G)`: the abelian part `R_K`, its
//! characters, and the representations `π_x` for rational `x`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::arch::ArchFunction;
use crate::character::DirichletCharacter;
use crate::exact::{ComplexApprox, Cyclotomic, Rational};
use crate::hecke::{HeckeAtom, HeckeElement};
use crate::localsb::{unit_mult_integral, LocalSb, UnitFunction};
use crate::numeric::{check_tol, BoundedValue, Truncation};
use crate::padic::{totient_prime_power, unit_residues, vp, Prime};
use crate::Error;

/// Spectral side of the trace formula.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub tr_rk: BoundedValue,
    pub tr_pi1: BoundedValue,
    pub characters: Vec<(DirichletCharacter, BoundedValue)>,
    pub total: BoundedValue,
}

/// Per-character traces for all characters mod `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharDecomposition {
    pub modulus: u64,
    pub traces: Vec<(DirichletCharacter, BoundedValue)>,
    pub sum: BoundedValue,
    pub tr_rk: BoundedValue,
    /// `Σ_χ` of the finite-place factors equals `∏_p unit_p(1)` for every atom.
    pub exact_checksum: bool,
}

impl CharDecomposition {
    /// The exact identity holds and the float sums agree to `tol`.
    pub fn checksum_passes(&self, tol: f64) -> bool {
        self.exact_checksum && self.sum.distance(&self.tr_rk) <= self.sum.bound + self.tr_rk.bound + tol
    }
}

/// `coeff · c · arch`, with error radii from all three factors.
pub(crate) fn assemble(coeff: Complex64, finite: &Cyclotomic, arch: BoundedValue) -> BoundedValue {
    if finite.is_zero() {
        return BoundedValue::ZERO;
    }
    let fin = BoundedValue::from(finite.eval()).scale(coeff, 0.0);
    fin.scale(arch.value, arch.bound)
}

/// `tr R_K(h) = Σ_{q∈Q^×} ĥ(q, 0)`, which collapses to the atoms:
/// `Σ coeff·∏_p unit_p(1)·∫additive_p·∫arch`.
pub fn trace_rk(h: &HeckeElement) -> Result<BoundedValue, Error> {
    let mut acc = BoundedValue::ZERO;
    for atom in h.atoms() {
        let finite = atom.unit_at_one()?.checked_mul(&atom.additive_integral()?)?;
        acc = acc + assemble(atom.coeff, &finite, atom.arch.integral_bounded());
    }
    Ok(acc)
}

/// `tr π₁(h) = Σ_{q∈Q^×} ∫_{Ẑ^×} ĥ(1, qa) d^×a`.
pub fn trace_pi1(h: &HeckeElement, tol: f64) -> Result<BoundedValue, Error> {
    trace_pi1_truncated(h, &Truncation::new(tol)?)
}

pub fn trace_pi1_truncated(h: &HeckeElement, trunc: &Truncation) -> Result<BoundedValue, Error> {
    let one = Rational::from_integer(BigInt::from(1));
    trace_pi_x_truncated(h, &one, None, trunc)
}

/// `tr (π_x ⊗ α)(h)` for rational `x`.
///
/// For `x ≠ 0` the stabilizer is trivial and the trace is
/// `Σ_{q∈Q^×} ∫_{Ẑ^×} ĥ(1, qxa) d^×a`, summed over the lattice of `q` with
/// `qx ∈ (1/D)Z`. For `x = 0` it is the trace of the character `α`.
pub fn trace_pi_x(
    h: &HeckeElement,
    x: &Rational,
    alpha: Option<&DirichletCharacter>,
    tol: f64,
) -> Result<BoundedValue, Error> {
    trace_pi_x_truncated(h, x, alpha, &Truncation::new(tol)?)
}

pub fn trace_pi_x_truncated(
    h: &HeckeElement,
    x: &Rational,
    alpha: Option<&DirichletCharacter>,
    trunc: &Truncation,
) -> Result<BoundedValue, Error> {
    check_tol(trunc.tol)?;
    if x.is_zero() {
        let trivial;
        let chi = match alpha {
            Some(a) => a,
            None => {
                trivial = DirichletCharacter::trivial(1)?;
                &trivial
            }
        };
        return trace_char(h, chi);
    }
    if alpha.is_some_and(|a| !a.is_trivial()) {
        return Err(Error::CharacterNeedsZeroOrbit);
    }
    let transformed: Vec<HeckeAtom> =
        h.at_identity_class().map(HeckeAtom::fourier).collect::<Result<_, _>>()?;
    unfolded_sum(&transformed, x, trunc)
}

/// `Σ_{q∈Q^×} Σ_atoms coeff·∏_p unit_p(1)·∫_{Z_p^×} f_p(qxu) d^×u · arch(qx)`
/// for atoms whose additive factors are `f_p`, with `q` running over
/// `den(x)/(D·|num(x)|)·Z ∖ {0}` so that `qx` runs over `(1/D)Z ∖ {0}`.
///
/// Shared by the spectral term (on `ĥ`) and the additive geometric term
/// (on `h`).
pub(crate) fn unfolded_sum(atoms: &[HeckeAtom], x: &Rational, trunc: &Truncation) -> Result<BoundedValue, Error> {
    check_tol(trunc.tol)?;
    if x.is_zero() {
        return Err(Error::ZeroScale);
    }
    let live: Vec<&HeckeAtom> = atoms.iter().filter(|a| a.coeff != Complex64::new(0.0, 0.0) && !a.arch.is_zero()).collect();
    if live.is_empty() {
        return Ok(BoundedValue::ZERO);
    }
    let share = Truncation { tol: trunc.tol / live.len() as f64, ..*trunc };
    let mut acc = BoundedValue::ZERO;
    for atom in live {
        acc = acc + unfolded_atom(atom, x, &share)?;
    }
    Ok(acc)
}

fn unfolded_atom(atom: &HeckeAtom, x: &Rational, trunc: &Truncation) -> Result<BoundedValue, Error> {
    let unit_one = atom.unit_at_one()?;
    if unit_one.is_zero() {
        return Ok(BoundedValue::ZERO);
    }
    let mut locals: Vec<(Prime, LocalSb)> = atom.locals().map(|f| (f.p(), f.additive.clone())).collect();
    if locals.iter().any(|(_, f)| f.is_zero()) {
        return Ok(BoundedValue::ZERO);
    }
    // (1/D)Z contains the support of ∏_p ∫ f_p(· u) d^×u on Q
    let d = lattice_denominator(&mut locals, trunc)?;

    let unit_one = unit_one.eval();
    let scalar = ComplexApprox::exact(atom.coeff) * unit_one;
    let weight_bound = (scalar.abs() + scalar.err) * locals.iter().map(|(_, f)| f.sup_bound()).product::<f64>();

    // q = m·den(x)/(D·|num(x)|), so qx = ±m/D; negative x reflects the real variable
    let step = Rational::new(x.denom().clone(), BigInt::from(d) * x.numer().abs());
    let arch: ArchFunction = if x.is_negative() { atom.arch.reflect() } else { atom.arch.clone() };

    let units: Vec<UnitFunction> = locals.iter().map(|(p, _)| UnitFunction::one(*p)).collect();
    let keys: Vec<u64> = locals
        .iter()
        .map(|(p, f)| {
            let s = vp(&Rational::from_integer(BigInt::from(d)), *p).unwrap_or(0) as u32;
            p.get().checked_pow(s + f.conductor_level()).ok_or_else(|| Error::Numeric("cache modulus overflow".into()))
        })
        .collect::<Result<_, _>>()?;
    let mut cache: Vec<BTreeMap<u64, ComplexApprox>> = alloc::vec![BTreeMap::new(); locals.len()];

    arch.weighted_lattice_sum(d, trunc, weight_bound, |m| {
        if m == 0 {
            return Ok(None);
        }
        let q = &step * Rational::from_integer(BigInt::from(m));
        let y = &q * x;
        let mut w = scalar;
        for (i, (_, f)) in locals.iter().enumerate() {
            let key = m.rem_euclid(keys[i] as i64) as u64;
            let local = match cache[i].get(&key) {
                Some(v) => *v,
                None => {
                    let v = unit_mult_integral(&units[i], &y, f)?.eval();
                    cache[i].insert(key, v);
                    v
                }
            };
            if local.re == 0.0 && local.im == 0.0 && local.err == 0.0 {
                return Ok(None);
            }
            w = w * local;
        }
        Ok(Some((w.value(), w.err)))
    })
}

/// `∏_p p^{s_p}` over the listed factors, times the truncation's
/// denominator scale. Primes of the scale that carry no factor get the
/// default `1_{Z_p}` appended, so the weights still vanish off the support.
pub(crate) fn lattice_denominator(locals: &mut Vec<(Prime, LocalSb)>, trunc: &Truncation) -> Result<u64, Error> {
    let overflow = || Error::Numeric("lattice denominator overflows 64 bits".into());
    let mut d: u64 = 1;
    for (p, f) in locals.iter() {
        d = p.get().checked_pow(f.support_level()).and_then(|pk| d.checked_mul(pk)).ok_or_else(overflow)?;
    }
    let scale = trunc.denominator_scale.max(1) as u64;
    for (p, _) in crate::exact::factor_u64(scale) {
        let p = Prime::new(p)?;
        if !locals.iter().any(|(q, _)| *q == p) {
            locals.push((p, LocalSb::unit_ball(p)));
        }
    }
    d.checked_mul(scale).ok_or_else(overflow)
}

/// `∫_{Z_p^×} g(u)·χ_p(u) d^×u`, exact.
pub fn unit_character_integral(g: &UnitFunction, chi: &DirichletCharacter) -> Result<Cyclotomic, Error> {
    let p = g.p();
    let e = chi.local_exponent(p);
    if e == 0 {
        return Ok(g.integral());
    }
    let level = g.level().max(e).max(1);
    let mut acc = Cyclotomic::zero();
    for r in unit_residues(p, level) {
        let gv = g.eval_residue(r, level);
        if gv.is_zero() {
            continue;
        }
        let u = Rational::from_integer(BigInt::from(r));
        acc = acc.checked_add(&gv.checked_mul(&chi.eval_local(p, &u))?)?;
    }
    Ok(acc.scale(&Rational::new(BigInt::from(1), BigInt::from(totient_prime_power(p, level)))))
}

/// Finite-place factor of `tr χ(h)` for one atom.
fn char_factor(atom: &HeckeAtom, chi: &DirichletCharacter) -> Result<Cyclotomic, Error> {
    let mut acc = atom.additive_integral()?;
    let mut primes: Vec<Prime> = atom.primes().collect();
    for (p, _) in crate::exact::factor_u64(chi.modulus()) {
        let p = Prime::new(p)?;
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    for p in primes {
        acc = acc.checked_mul(&unit_character_integral(&atom.local(p).unit, chi)?)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// `tr χ(h) = Σ coeff·∏_p ∫_{Z_p^×} unit_p·χ_p d^×u·∫additive_p·∫arch`.
pub fn trace_char(h: &HeckeElement, chi: &DirichletCharacter) -> Result<BoundedValue, Error> {
    let mut acc = BoundedValue::ZERO;
    for atom in h.atoms() {
        acc = acc + assemble(atom.coeff, &char_factor(atom, chi)?, atom.arch.integral_bounded());
    }
    Ok(acc)
}

/// `∏_p p^{e_p}` with `e_p` the largest conductor exponent of a unit factor
/// at `p`.
pub fn unit_conductor(h: &HeckeElement) -> Result<u64, Error> {
    let mut exps: BTreeMap<Prime, u32> = BTreeMap::new();
    for atom in h.atoms() {
        for f in atom.locals() {
            let e = f.unit.conductor_exponent();
            let slot = exps.entry(f.p()).or_insert(0);
            *slot = (*slot).max(e);
        }
    }
    exps.iter().try_fold(1u64, |acc, (p, e)| {
        p.get().checked_pow(*e).and_then(|pe| acc.checked_mul(pe)).ok_or_else(|| Error::Numeric("conductor overflows 64 bits".into()))
    })
}

/// Traces of all characters mod `N` and the completeness checksum.
pub fn char_decompose(h: &HeckeElement, modulus: u64) -> Result<CharDecomposition, Error> {
    let required = unit_conductor(h)?;
    if modulus == 0 || !modulus.is_multiple_of(required) {
        return Err(Error::ModulusTooSmall { modulus, required });
    }
    let chars = DirichletCharacter::all(modulus)?;
    let mut per_atom_sums: Vec<Cyclotomic> = alloc::vec![Cyclotomic::zero(); h.atoms().len()];
    let mut traces = Vec::with_capacity(chars.len());
    let mut sum = BoundedValue::ZERO;
    for chi in chars {
        let mut t = BoundedValue::ZERO;
        for (i, atom) in h.atoms().iter().enumerate() {
            let f = char_factor(atom, &chi)?;
            per_atom_sums[i] = per_atom_sums[i].checked_add(&f)?;
            t = t + assemble(atom.coeff, &f, atom.arch.integral_bounded());
        }
        sum = sum + t;
        traces.push((chi, t));
    }
    let mut exact_checksum = true;
    for (atom, s) in h.atoms().iter().zip(&per_atom_sums) {
        let expect = atom.unit_at_one()?.checked_mul(&atom.additive_integral()?)?;
        exact_checksum &= *s == expect;
    }
    Ok(CharDecomposition { modulus, traces, sum, tr_rk: trace_rk(h)?, exact_checksum })
}

/// `tr R_K(h) + tr π₁(h)`, with optional per-character traces mod `N`.
pub fn spectral_report(h: &HeckeElement, trunc: &Truncation, modulus: Option<u64>) -> Result<SpectralReport, Error> {
    let tr_rk = trace_rk(h)?;
    let tr_pi1 = trace_pi1_truncated(h, trunc)?;
    let characters = match modulus {
        Some(n) => char_decompose(h, n)?.traces,
        None => Vec::new(),
    };
    Ok(SpectralReport { tr_rk, tr_pi1, characters, total: tr_rk + tr_pi1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};
    use crate::hecke::LocalFactor;
    use crate::padic::PadicBall;
    use core::f64::consts::PI;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn with_local(q: Rational, f: LocalFactor) -> HeckeElement {
        HeckeElement::new(alloc::vec![HeckeAtom::new(one(), q, [f], ArchFunction::standard()).unwrap()])
    }

    fn at_two() -> HeckeElement {
        HeckeElement::new(alloc::vec![HeckeAtom::new(one(), integer(2), [], ArchFunction::standard()).unwrap()])
    }

    fn additive_2z2() -> HeckeElement {
        let f = LocalFactor::new(UnitFunction::one(pr(2)), LocalSb::indicator(&PadicBall::new(pr(2), integer(0), 1)).unwrap()).unwrap();
        with_local(integer(1), f)
    }

    fn unit_2_mod_3() -> HeckeElement {
        let g = UnitFunction::from_atoms(pr(3), [(Cyclotomic::one(), PadicBall::new(pr(3), integer(2), 1))]).unwrap();
        with_local(integer(1), LocalFactor::new(g, LocalSb::unit_ball(pr(3))).unwrap())
    }

    fn theta(d: f64) -> f64 {
        (-40i32..=40).map(|n| libm::exp(-PI * (n as f64 / d).powi(2))).sum()
    }

    #[test]
    fn trace_rk_examples() {
        assert!((trace_rk(&HeckeElement::standard()).unwrap().value - one()).norm() < 1e-15);
        assert!((trace_rk(&at_two()).unwrap().value - one()).norm() < 1e-15);
        assert_eq!(trace_rk(&unit_2_mod_3()).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn trace_pi1_examples() {
        let t = trace_pi1(&HeckeElement::standard(), 1e-12).unwrap();
        assert!((t.value.re - (theta(1.0) - 1.0)).abs() <= t.bound + 1e-15);
        assert!((t.value.re - 0.0864348112).abs() < 1e-10);

        let t = trace_pi1(&additive_2z2(), 1e-12).unwrap();
        assert!((t.value.re - 0.5 * (theta(2.0) - 1.0)).abs() <= t.bound + 1e-14);
        assert!((t.value.re - 0.5000070).abs() < 1e-7);

        assert_eq!(trace_pi1(&at_two(), 1e-9).unwrap(), BoundedValue::ZERO);
        assert!(trace_pi1(&HeckeElement::standard(), 0.0).is_err());
    }

    #[test]
    fn trace_char_examples() {
        let h = HeckeElement::standard();
        let triv = DirichletCharacter::trivial(3).unwrap();
        let odd = DirichletCharacter::from_generator_images(3, &[(2, crate::exact::Angle::new(1, 2))]).unwrap();
        assert!((trace_char(&h, &triv).unwrap().value - one()).norm() < 1e-15);
        assert_eq!(trace_char(&h, &odd).unwrap().value, Complex64::new(0.0, 0.0));
        let t = trace_char(&unit_2_mod_3(), &odd).unwrap();
        assert!((t.value.re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn char_decompose_examples() {
        let d = char_decompose(&HeckeElement::standard(), 1).unwrap();
        assert_eq!(d.traces.len(), 1);
        assert!(d.checksum_passes(1e-12));
        let d = char_decompose(&HeckeElement::standard(), 3).unwrap();
        assert!((d.traces[0].1.value - one()).norm() < 1e-15);
        assert_eq!(d.traces[1].1.value, Complex64::new(0.0, 0.0));
        assert!(d.checksum_passes(1e-12));
        let d = char_decompose(&unit_2_mod_3(), 3).unwrap();
        assert!((d.traces[0].1.value.re - 0.5).abs() < 1e-15);
        assert!((d.traces[1].1.value.re + 0.5).abs() < 1e-15);
        assert!(d.checksum_passes(1e-12));
        assert_eq!(char_decompose(&unit_2_mod_3(), 4), Err(Error::ModulusTooSmall { modulus: 4, required: 3 }));
    }

    #[test]
    fn orbit_parameters() {
        let h = additive_2z2();
        let base = trace_pi1(&h, 1e-12).unwrap();
        for x in [integer(2), rational(1, 2), integer(-3)] {
            let t = trace_pi_x(&h, &x, None, 1e-12).unwrap();
            assert!(t.agrees_with(&base), "x = {x}");
        }
        let odd = DirichletCharacter::from_generator_images(3, &[(2, crate::exact::Angle::new(1, 2))]).unwrap();
        assert_eq!(trace_pi_x(&h, &integer(1), Some(&odd), 1e-9), Err(Error::CharacterNeedsZeroOrbit));
        let z = trace_pi_x(&unit_2_mod_3(), &integer(0), Some(&odd), 1e-9).unwrap();
        assert_eq!(z, trace_char(&unit_2_mod_3(), &odd).unwrap());
    }

    #[test]
    fn doubling_truncation_stays_inside_the_bound() {
        for h in [HeckeElement::standard(), additive_2z2(), unit_2_mod_3()] {
            let t = Truncation::new(1e-6).unwrap();
            let base = trace_pi1_truncated(&h, &t).unwrap();
            let big = trace_pi1_truncated(&h, &t.enlarged(2)).unwrap();
            assert!(base.distance(&big) <= base.bound, "{base:?} {big:?}");
        }
    }
}
