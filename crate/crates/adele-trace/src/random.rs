//! Seeded random test functions.
//!
//! Parameter box, with `L` the maximum level:
//!
//! * local factors only at a random subset of the requested primes, with the
//!   unit ball and the constant `1` elsewhere;
//! * additive factors are sums of one or two twisted balls with centers
//!   `j/p^L`, twists `t/p^L`, levels in `[-L, L]` and coefficients
//!   `(n/2)·e(k/4)` with `n ∈ {1, 2, 3}`;
//! * unit factors are tables mod `p^k`, `k ≤ max(L, 1)`, whose values are
//!   small rationals times fourth roots of unity;
//! * the `q`-support always contains `1`, plus at most two more values
//!   `±n/d` with `1 ≤ n, d ≤ 6`;
//! * atom coefficients lie in `[-1, 1]²`; each archimedean part has one or
//!   two atoms with width in `[1/2, 2]` and shift, modulation in `[-1, 1]`.
//!
//! Floats are multiples of `2^-10` so that documents round-trip exactly.

use adele_trace_core::exact::{integer, rational};
use adele_trace_core::padic::unit_coset_reps;
use adele_trace_core::{
    Angle, ArchAtom, ArchFunction, Cyclotomic, Error, HeckeAtom, HeckeElement, LocalFactor, LocalSb, PadicBall,
    PoissonInput, Prime, Rational, TwistedBall, UnitFunction,
};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct RandomBox {
    pub primes: Vec<Prime>,
    /// Number of Hecke atoms.
    pub atoms: usize,
    pub max_level: u32,
    /// When set, every unit factor has conductor dividing this modulus.
    pub unit_modulus: Option<u64>,
}

impl RandomBox {
    /// Primes `{2, 3, 5}`, three atoms, levels up to 2.
    pub fn standard() -> Self {
        RandomBox {
            primes: [2, 3, 5].iter().map(|&p| Prime::new(p).expect("prime")).collect(),
            atoms: 3,
            max_level: 2,
            unit_modulus: None,
        }
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dyadic(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let steps = ((hi - lo) * 1024.0) as i64;
    lo + rng.gen_range(0..=steps) as f64 / 1024.0
}

fn small_cyclotomic(rng: &mut ChaCha8Rng) -> Cyclotomic {
    let n = rng.gen_range(1..=3i64);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    Cyclotomic::e(Angle::new(rng.gen_range(0..4), 4)).scale(&rational(sign * n, 2))
}

fn p_power_fraction(rng: &mut ChaCha8Rng, p: Prime, level: u32) -> Rational {
    let pl = p.pow(level) as i64;
    rational(rng.gen_range(0..pl), pl)
}

pub fn random_local_sb(rng: &mut ChaCha8Rng, p: Prime, max_level: u32) -> Result<LocalSb, Error> {
    let l = max_level as i64;
    let mut f = LocalSb::zero(p);
    for _ in 0..rng.gen_range(1..=2) {
        let coeff = small_cyclotomic(rng);
        let twist = if rng.gen_bool(0.5) { p_power_fraction(rng, p, max_level) } else { integer(0) };
        let center = p_power_fraction(rng, p, max_level);
        let level = rng.gen_range(-l..=l);
        f.add_atom(&TwistedBall::new(coeff, twist, PadicBall::new(p, center, level)))?;
    }
    Ok(f)
}

/// A unit factor at `p` constant on cosets of `1 + p^k Z_p`.
pub fn random_unit(rng: &mut ChaCha8Rng, p: Prime, k: u32) -> Result<UnitFunction, Error> {
    if k == 0 {
        return Ok(UnitFunction::constant(p, Cyclotomic::from_rational(rational(rng.gen_range(1..=4), 2))));
    }
    let atoms = unit_coset_reps(p, k)
        .into_iter()
        .map(|r| (small_cyclotomic(rng), PadicBall::new(p, r, k as i64)))
        .collect::<Vec<_>>();
    UnitFunction::from_atoms(p, atoms)
}

fn unit_level(p: Prime, max_level: u32, unit_modulus: Option<u64>, rng: &mut ChaCha8Rng) -> u32 {
    let cap = match unit_modulus {
        Some(n) => {
            let mut e = 0;
            let mut m = n;
            while m % p.get() == 0 {
                m /= p.get();
                e += 1;
            }
            e
        }
        None => max_level.max(1),
    };
    rng.gen_range(0..=cap)
}

pub fn random_arch(rng: &mut ChaCha8Rng) -> Result<ArchFunction, Error> {
    let n = rng.gen_range(1..=2);
    let atoms = (0..n)
        .map(|_| {
            let amp = Complex64::new(dyadic(rng, -1.0, 1.0), dyadic(rng, -1.0, 1.0));
            ArchAtom::new(amp, dyadic(rng, 0.5, 2.0), dyadic(rng, -1.0, 1.0), dyadic(rng, -1.0, 1.0))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ArchFunction::new(atoms)
}

fn random_q_support(rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let one = integer(1);
    let mut support = vec![one.clone()];
    for _ in 0..rng.gen_range(0..=2) {
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let q = rational(sign * rng.gen_range(1..=6), rng.gen_range(1..=6));
        if !support.contains(&q) {
            support.push(q);
        }
    }
    support
}

fn random_primes(rng: &mut ChaCha8Rng, primes: &[Prime]) -> Vec<Prime> {
    let mut chosen: Vec<Prime> = primes.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    chosen.shuffle(rng);
    chosen
}

/// A random Hecke element; the first atom always has `q = 1`.
pub fn random_hecke(seed: u64, bx: &RandomBox) -> Result<HeckeElement, Error> {
    let mut rng = rng_for(seed);
    let support = random_q_support(&mut rng);
    let mut atoms = Vec::with_capacity(bx.atoms);
    for i in 0..bx.atoms.max(1) {
        let q = if i == 0 { support[0].clone() } else { support.choose(&mut rng).expect("nonempty").clone() };
        let coeff = Complex64::new(dyadic(&mut rng, -1.0, 1.0), dyadic(&mut rng, -1.0, 1.0));
        let mut locals = Vec::new();
        for p in random_primes(&mut rng, &bx.primes) {
            let k = unit_level(p, bx.max_level, bx.unit_modulus, &mut rng);
            let unit = random_unit(&mut rng, p, k)?;
            let additive = random_local_sb(&mut rng, p, bx.max_level)?;
            locals.push(LocalFactor::new(unit, additive)?);
        }
        atoms.push(HeckeAtom::new(coeff, q, locals, random_arch(&mut rng)?)?);
    }
    Ok(HeckeElement::new(atoms))
}

pub fn random_poisson(seed: u64, bx: &RandomBox) -> Result<PoissonInput, Error> {
    let mut rng = rng_for(seed);
    let mut locals = Vec::new();
    for p in random_primes(&mut rng, &bx.primes) {
        locals.push(random_local_sb(&mut rng, p, bx.max_level)?);
    }
    PoissonInput::new(locals, random_arch(&mut rng)?)
}

/// A random local function for the transform checks.
pub fn random_local_sb_seeded(seed: u64, p: Prime, max_level: u32) -> Result<LocalSb, Error> {
    random_local_sb(&mut rng_for(seed), p, max_level)
}
