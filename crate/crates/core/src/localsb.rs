//! Schwartz-Bruhat functions on `Q_p` and locally constant functions on
//! `Z_p^×`, with exact Fourier transform and exact additive and
//! multiplicative integrals.
//!
//! A [`LocalSb`] is stored in a canonical normal form built from the basis
//!
//! ```text
//! e(c, b)(x) = ψ_p(b·x) · 1_{c + Z_p}(x),   c, b ∈ Z[1/p] / Z
//! ```
//!
//! i.e. every atom is refined (or expanded into characters) to balls of the
//! single common level 0, with centres and twists reduced to `[0, 1)` and the
//! phase of the twist reduction absorbed into the coefficient. For a fixed
//! level the expansion of a function in this basis is unique, so equality of
//! functions is equality of term maps. The basis is closed under the Fourier
//! transform: `ê(c, b) = ψ_p(b·c) · e(−b, c)`, which makes the transform a
//! signed permutation of terms.
//!
//! An atom at level `n` becomes `p^|n|` basis terms, so very fine or very
//! coarse balls are refused above [`MAX_EXPANSION`] terms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{rational_pow, Angle, Cyclotomic, Rational};
use crate::padic::{frac_p, frac_p_angle, psi_p, residue_mod, totient_prime_power, unit_residues, vp, PadicBall, Prime};
use crate::Error;

/// Largest number of level-0 terms a single atom may expand into.
pub const MAX_EXPANSION: u64 = 1 << 16;

/// `x ↦ coeff · ψ_p(twist·x) · 1_ball(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedBall {
    pub coeff: Cyclotomic,
    pub twist: Rational,
    pub ball: PadicBall,
}

impl TwistedBall {
    pub fn new(coeff: Cyclotomic, twist: Rational, ball: PadicBall) -> Self {
        TwistedBall { coeff, twist, ball }
    }

    /// The plain indicator of a ball.
    pub fn indicator(ball: PadicBall) -> Self {
        TwistedBall { coeff: Cyclotomic::one(), twist: Rational::zero(), ball }
    }
}

/// A Schwartz-Bruhat function on `Q_p`, in canonical level-0 form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalSb {
    p: Prime,
    // (centre, twist) -> coefficient; both angles have p-power denominators
    terms: BTreeMap<(Angle, Angle), Cyclotomic>,
}

impl LocalSb {
    pub fn zero(p: Prime) -> Self {
        LocalSb { p, terms: BTreeMap::new() }
    }

    /// `1_{Z_p}`, the default additive factor.
    pub fn unit_ball(p: Prime) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((Angle::ZERO, Angle::ZERO), Cyclotomic::one());
        LocalSb { p, terms }
    }

    pub fn indicator(ball: &PadicBall) -> Result<Self, Error> {
        LocalSb::from_atoms(ball.p(), [TwistedBall::indicator(ball.clone())])
    }

    pub fn from_atoms<I>(p: Prime, atoms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = TwistedBall>,
    {
        let mut f = LocalSb::zero(p);
        for atom in atoms {
            f.add_atom(&atom)?;
        }
        Ok(f)
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_unit_ball(&self) -> bool {
        *self == LocalSb::unit_ball(self.p)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Canonical atoms: level-0 balls, ascending by (centre, twist).
    pub fn atoms(&self) -> Vec<TwistedBall> {
        self.terms
            .iter()
            .map(|((c, b), coeff)| TwistedBall {
                coeff: coeff.clone(),
                twist: b.to_rational(),
                ball: PadicBall::new(self.p, c.to_rational(), 0),
            })
            .collect()
    }

    pub fn add_atom(&mut self, atom: &TwistedBall) -> Result<(), Error> {
        if atom.ball.p() != self.p {
            return Err(Error::PlaceMismatch { expected: self.p.get(), found: atom.ball.p().get() });
        }
        if atom.coeff.is_zero() {
            return Ok(());
        }
        let p = self.p.get();
        let level = atom.ball.level();
        let count = p
            .checked_pow(level.unsigned_abs() as u32)
            .filter(|&c| c <= MAX_EXPANSION)
            .ok_or(Error::LevelTooLarge { p, level, limit: MAX_EXPANSION })?;
        let center = atom.ball.center();
        if level <= 0 {
            // c + p^n Z_p is the disjoint union of the Z_p-cosets c + j p^n + Z_p
            let step = rational_pow(p, level);
            for j in 0..count {
                let x = center + &step * Rational::from_integer(BigInt::from(j));
                let c0 = frac_p_angle(&x, self.p)?;
                self.push(c0, &atom.twist, atom.coeff.clone())?;
            }
        } else {
            // 1_{c + p^n Z_p} = p^−n Σ_{t ∈ p^−n Z_p / Z_p} ψ_p(t(x − c)) on c + Z_p
            let c0 = frac_p_angle(center, self.p)?;
            let scale = rational_pow(p, -level);
            let weight = atom.coeff.scale(&scale);
            for j in 0..count {
                let t = Rational::new(BigInt::from(j), BigInt::from(count));
                let phase = psi_p(&(-(&t * center)), self.p)?;
                self.push(c0, &(&atom.twist + &t), weight.checked_mul(&phase)?)?;
            }
        }
        Ok(())
    }

    /// Add `coeff · ψ_p(twist·x)` on the ball `center + Z_p`, reducing the
    /// twist to `[0, 1)`. For `x ∈ c + Z_p` and `twist = β' + δ` with
    /// `δ ∈ Z_p`, `ψ_p(δx) = ψ_p(δc)`, which is the absorbed phase.
    fn push(&mut self, center: Angle, twist: &Rational, coeff: Cyclotomic) -> Result<(), Error> {
        let reduced = frac_p(twist, self.p);
        let delta = twist - &reduced;
        let coeff = if delta.is_zero() || center.is_zero() {
            coeff
        } else {
            coeff.checked_mul(&psi_p(&(delta * center.to_rational()), self.p)?)?
        };
        let key = (center, Angle::from_rational(&reduced)?);
        self.insert(key, coeff)
    }

    fn insert(&mut self, key: (Angle, Angle), coeff: Cyclotomic) -> Result<(), Error> {
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.checked_add(&coeff)?;
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
        Ok(())
    }

    /// `f(x) = Σ_{atoms ∋ x} coeff · ψ_p(b·x)`.
    pub fn eval(&self, x: &Rational) -> Result<Cyclotomic, Error> {
        let center = match Angle::from_rational(&frac_p(x, self.p)) {
            Ok(c) => c,
            // finer than any stored centre, so outside the support
            Err(_) => return Ok(Cyclotomic::zero()),
        };
        let mut acc = Cyclotomic::zero();
        for ((c, b), coeff) in self.terms.range((center, Angle::ZERO)..) {
            if *c != center {
                break;
            }
            let phase = psi_p(&(b.to_rational() * x), self.p)?;
            acc = acc.checked_add(&coeff.checked_mul(&phase)?)?;
        }
        Ok(acc)
    }

    /// Fourier transform `f̂(y) = ∫ f(x) ψ_p(xy) dx`, exact.
    pub fn fourier(&self) -> Result<LocalSb, Error> {
        let mut out = LocalSb::zero(self.p);
        for ((c, b), coeff) in &self.terms {
            let phase = psi_p(&(b.to_rational() * c.to_rational()), self.p)?;
            out.insert((-*b, *c), coeff.checked_mul(&phase)?)?;
        }
        Ok(out)
    }

    /// `∫_{Q_p} f(x) dx` with `vol(Z_p) = 1`: only untwisted terms survive.
    pub fn integral(&self) -> Cyclotomic {
        self.terms
            .iter()
            .filter(|((_, b), _)| b.is_zero())
            .fold(Cyclotomic::zero(), |acc, (_, c)| &acc + c)
    }

    /// `∫_{p^k Z_p} f(x) dx`, exact.
    pub fn ball_integral(&self, k: i64) -> Cyclotomic {
        let mut acc = Cyclotomic::zero();
        for ((c, b), v) in &self.terms {
            if k <= 0 {
                // c + Z_p lies in p^k Z_p or is disjoint from it
                if b.is_zero() && self.log_p(c.den()) as i64 <= -k {
                    acc = &acc + v;
                }
            } else if c.is_zero() && self.log_p(b.den()) as i64 <= k {
                acc = &acc + &v.scale(&rational_pow(self.p.get(), -k));
            }
        }
        acc
    }

    /// `∫_{Q_p} f·ḡ dx`. The basis functions `ψ_p(bx)·1_{c+Z_p}` are
    /// orthonormal, so this is a sum over shared terms.
    pub fn inner(&self, other: &LocalSb) -> Result<Cyclotomic, Error> {
        self.same_place(other)?;
        let mut acc = Cyclotomic::zero();
        for (k, v) in &self.terms {
            if let Some(w) = other.terms.get(k) {
                acc = acc.checked_add(&v.checked_mul(&w.conj())?)?;
            }
        }
        Ok(acc)
    }

    pub fn checked_add(&self, other: &LocalSb) -> Result<LocalSb, Error> {
        self.same_place(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(*k, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Cyclotomic) -> Result<LocalSb, Error> {
        let mut out = LocalSb::zero(self.p);
        for (k, v) in &self.terms {
            out.insert(*k, v.checked_mul(c)?)?;
        }
        Ok(out)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &LocalSb) -> Result<LocalSb, Error> {
        self.same_place(other)?;
        let mut out = LocalSb::zero(self.p);
        for ((c, b1), v1) in &self.terms {
            for ((_, b2), v2) in other.terms.range((*c, Angle::ZERO)..).take_while(|((c2, _), _)| c2 == c) {
                // b1 + b2 = sum + δ with δ ∈ {0, 1}, and ψ_p(δx) = e(δc) on c + Z_p
                let sum = b1.checked_add(*b2)?;
                let coeff = v1.checked_mul(v2)?;
                let coeff = if sum < *b1 { coeff.rotate(*c)? } else { coeff };
                out.insert((*c, sum), coeff)?;
            }
        }
        Ok(out)
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Result<LocalSb, Error> {
        let mut out = LocalSb::zero(self.p);
        for ((c, b), v) in &self.terms {
            out.push(*c, &-b.to_rational(), v.conj())?;
        }
        Ok(out)
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> Result<LocalSb, Error> {
        let mut out = LocalSb::zero(self.p);
        for ((c, b), v) in &self.terms {
            out.push(-*c, &-b.to_rational(), v.clone())?;
        }
        Ok(out)
    }

    /// An upper bound for `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        let mut best = 0.0f64;
        let mut current: Option<(Angle, f64)> = None;
        for ((c, _), v) in &self.terms {
            let a = v.eval();
            let m = a.abs() + a.err;
            current = match current {
                Some((c0, s)) if c0 == *c => Some((c0, s + m)),
                Some((_, s)) => {
                    best = best.max(s);
                    Some((*c, m))
                }
                None => Some((*c, m)),
            };
        }
        if let Some((_, s)) = current {
            best = best.max(s);
        }
        best * (1.0 + 1e-12)
    }

    /// Smallest `s ≥ 0` with `supp f ⊆ p^−s Z_p`.
    pub fn support_level(&self) -> u32 {
        self.terms.keys().map(|(c, _)| self.log_p(c.den())).max().unwrap_or(0)
    }

    /// Smallest `k ≥ 0` such that `f` is invariant under `p^k Z_p`.
    pub fn conductor_level(&self) -> u32 {
        self.terms.keys().map(|(_, b)| self.log_p(b.den())).max().unwrap_or(0)
    }

    fn log_p(&self, mut d: u64) -> u32 {
        let mut k = 0;
        while d > 1 {
            d /= self.p.get();
            k += 1;
        }
        k
    }

    fn same_place(&self, other: &LocalSb) -> Result<(), Error> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::PlaceMismatch { expected: self.p.get(), found: other.p.get() })
        }
    }
}

/// A locally constant function on `Z_p^×`, stored by its values on the
/// cosets of `1 + p^level Z_p` at the coarsest level `≥ 1` on which it is
/// constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnitFunction {
    p: Prime,
    level: u32,
    values: BTreeMap<u64, Cyclotomic>,
}

impl UnitFunction {
    /// `1_{Z_p^×}`, the default unit factor.
    pub fn one(p: Prime) -> Self {
        UnitFunction::constant(p, Cyclotomic::one())
    }

    pub fn constant(p: Prime, c: Cyclotomic) -> Self {
        let values = if c.is_zero() { BTreeMap::new() } else { unit_residues(p, 1).map(|r| (r, c.clone())).collect() };
        UnitFunction { p, level: 1, values }
    }

    /// Sum of `coeff · 1_coset`; every coset must lie in `Z_p^×`.
    pub fn from_atoms<I>(p: Prime, atoms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (Cyclotomic, PadicBall)>,
    {
        let atoms: Vec<(Cyclotomic, PadicBall)> = atoms.into_iter().collect();
        let mut level = 1u32;
        for (_, ball) in &atoms {
            if ball.p() != p {
                return Err(Error::PlaceMismatch { expected: p.get(), found: ball.p().get() });
            }
            if !ball.is_unit_coset() {
                return Err(Error::NotAUnitCoset { p: p.get(), center: ball.center().clone(), level: ball.level() });
            }
            level = level.max(ball.level() as u32);
        }
        let size = p.get().checked_pow(level).filter(|&s| s <= MAX_EXPANSION);
        if size.is_none() {
            return Err(Error::LevelTooLarge { p: p.get(), level: level as i64, limit: MAX_EXPANSION });
        }
        let mut values: BTreeMap<u64, Cyclotomic> = BTreeMap::new();
        for (coeff, ball) in &atoms {
            let n = ball.level() as u32;
            let base = residue_mod(ball.center(), p, n);
            let step = p.pow(n);
            for j in 0..p.pow(level - n) {
                let r = base + j * step;
                let entry = values.entry(r).or_default();
                *entry = entry.checked_add(coeff)?;
            }
        }
        Ok(UnitFunction::from_values(p, level, values))
    }

    /// Canonicalise a table of values at `level` (residues mod `p^level`).
    pub fn from_values(p: Prime, level: u32, values: BTreeMap<u64, Cyclotomic>) -> Self {
        let mut level = level.max(1);
        let mut values: BTreeMap<u64, Cyclotomic> = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        while level > 1 {
            let coarse = p.pow(level - 1);
            let consistent = unit_residues(p, level - 1).all(|r| {
                let first = values.get(&r);
                (1..p.get()).all(|j| values.get(&(r + j * coarse)) == first)
            });
            if !consistent {
                break;
            }
            values.retain(|r, _| *r < coarse);
            level -= 1;
        }
        UnitFunction { p, level, values }
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == UnitFunction::one(self.p)
    }

    /// `(coefficient, coset)` pairs at the canonical level.
    pub fn atoms(&self) -> Vec<(Cyclotomic, PadicBall)> {
        self.values
            .iter()
            .map(|(r, v)| (v.clone(), PadicBall::new(self.p, Rational::from_integer(BigInt::from(*r)), self.level as i64)))
            .collect()
    }

    /// Value at a p-adic unit; zero off `Z_p^×`.
    pub fn eval(&self, u: &Rational) -> Cyclotomic {
        if vp(u, self.p) != Some(0) {
            return Cyclotomic::zero();
        }
        self.values.get(&residue_mod(u, self.p, self.level)).cloned().unwrap_or_default()
    }

    /// Value on the coset `r + p^k Z_p` for any `k ≥ level`.
    pub fn eval_residue(&self, r: u64, k: u32) -> Cyclotomic {
        debug_assert!(k >= self.level);
        self.values.get(&(r % self.p.pow(self.level))).cloned().unwrap_or_default()
    }

    /// `∫_{Z_p^×} g(u) d^×u` with `vol(Z_p^×) = 1`.
    pub fn integral(&self) -> Cyclotomic {
        let total = self.values.values().fold(Cyclotomic::zero(), |acc, v| &acc + v);
        total.scale(&Rational::new(BigInt::one(), BigInt::from(totient_prime_power(self.p, self.level))))
    }

    /// The exponent `e` of the smallest `p^e` such that `g` is constant on
    /// the cosets of `1 + p^e Z_p` (with `e = 0` for constant functions).
    pub fn conductor_exponent(&self) -> u32 {
        if self.level > 1 {
            return self.level;
        }
        let mut vals = unit_residues(self.p, 1).map(|r| self.values.get(&r));
        let first = vals.next().flatten();
        if vals.all(|v| v == first) {
            0
        } else {
            1
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &UnitFunction) -> Result<UnitFunction, Error> {
        if self.p != other.p {
            return Err(Error::PlaceMismatch { expected: self.p.get(), found: other.p.get() });
        }
        let level = self.level.max(other.level);
        let mut values = BTreeMap::new();
        for r in unit_residues(self.p, level) {
            let v = self.eval_residue(r, level).checked_mul(&other.eval_residue(r, level))?;
            values.insert(r, v);
        }
        Ok(UnitFunction::from_values(self.p, level, values))
    }
}

/// `∫_{Z_p^×} g(u) · f(q·u) d^×u`, exact.
///
/// For `g` constant this is the average of `f` over the shell `q·Z_p^×`.
/// Otherwise the integrand is refined to a level `K` on which both `g` and
/// `u ↦ f(qu)` are constant on the cosets of `1 + p^K Z_p`, and the integral
/// becomes a sum over coset representatives with weight `1/φ(p^K)`.
pub fn unit_mult_integral(g: &UnitFunction, q: &Rational, f: &LocalSb) -> Result<Cyclotomic, Error> {
    if q.is_zero() {
        return Err(Error::ZeroScale);
    }
    if g.p() != f.p() {
        return Err(Error::PlaceMismatch { expected: g.p().get(), found: f.p().get() });
    }
    if g.is_zero() || f.is_zero() {
        return Ok(Cyclotomic::zero());
    }
    let p = f.p();
    let v = vp(q, p).expect("q is nonzero");
    let support = f.support_level() as i64;
    let conductor = f.conductor_level() as i64;
    if v < -support {
        return Ok(Cyclotomic::zero());
    }
    if v >= conductor {
        // q·u ∈ p^k Z_p for every unit u, where f is constant
        return f.eval(&Rational::zero())?.checked_mul(&g.integral());
    }
    if g.conductor_exponent() == 0 {
        // average of f over the shell q·Z_p^× of volume p^−v (1 − 1/p)
        let shell = f.ball_integral(v).checked_add(&f.ball_integral(v + 1).scale(&-Rational::one()))?;
        let pv = rational_pow(p.get(), v + 1) / Rational::from_integer(BigInt::from(p.get() - 1));
        return g.eval_residue(1, g.level()).checked_mul(&shell.scale(&pv));
    }
    let level = g.level().max((conductor - v) as u32).max(1);
    if p.get().checked_pow(level).is_none_or(|n| n > MAX_EXPANSION * 16) {
        return Err(Error::LevelTooLarge { p: p.get(), level: level as i64, limit: MAX_EXPANSION * 16 });
    }
    let mut acc = Cyclotomic::zero();
    for r in unit_residues(p, level) {
        let gv = g.eval_residue(r, level);
        if gv.is_zero() {
            continue;
        }
        let fv = f.eval(&(q * Rational::from_integer(BigInt::from(r))))?;
        if fv.is_zero() {
            continue;
        }
        acc = acc.checked_add(&gv.checked_mul(&fv)?)?;
    }
    Ok(acc.scale(&Rational::new(BigInt::one(), BigInt::from(totient_prime_power(p, level)))))
}
