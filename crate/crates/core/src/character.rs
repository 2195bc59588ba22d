//! Dirichlet characters modulo `N`, given by their values on a fixed
//! generating set of `(Z/N)^×`.
//!
//! The generating set is built per prime power `p^e ‖ N`: the smallest
//! primitive root for odd `p`, `3` for `4`, and `−1, 5` for `2^e` with
//! `e ≥ 3`. Each local generator is lifted by CRT to a residue mod `N` that is
//! `1` modulo the other prime powers.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::exact::{factor_u64, inv_mod_u64, Angle, Cyclotomic, Rational};
use crate::padic::{residue_mod, Prime};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Component {
    p: u64,
    e: u32,
    pe: u64,
    // (local generator mod p^e, its order)
    gens: Vec<(u64, u64)>,
}

fn pow_mod(mut b: u64, mut k: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while k > 0 {
        if k & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        k >>= 1;
    }
    r
}

fn multiplicative_order(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * g as u128) % m as u128) as u64;
        k += 1;
    }
    k
}

impl Component {
    fn new(p: u64, e: u32) -> Component {
        let pe = p.pow(e);
        let gens = if p == 2 {
            match e {
                1 => Vec::new(),
                2 => alloc::vec![(3, 2)],
                _ => alloc::vec![(pe - 1, 2), (5, pe / 4)],
            }
        } else {
            let phi = (p - 1) * p.pow(e - 1);
            let g = (2..pe).find(|&g| g % p != 0 && multiplicative_order(g, pe) == phi).expect("odd prime powers are cyclic");
            alloc::vec![(g, phi)]
        };
        Component { p, e, pe, gens }
    }

    /// Exponents of `r` (a unit mod p^e) in the local generators.
    fn log(&self, r: u64) -> Vec<u64> {
        let r = r % self.pe;
        match self.gens.as_slice() {
            [] => Vec::new(),
            [(g, n)] => {
                let k = (0..*n).find(|&k| pow_mod(*g, k, self.pe) == r).expect("unit residue");
                alloc::vec![k]
            }
            [(minus_one, _), (five, n)] => {
                for s in 0..2u64 {
                    for k in 0..*n {
                        let v = pow_mod(*minus_one, s, self.pe) * pow_mod(*five, k, self.pe) % self.pe;
                        if v == r {
                            return alloc::vec![s, k];
                        }
                    }
                }
                unreachable!("unit residue")
            }
            _ => unreachable!(),
        }
    }
}

fn components(n: u64) -> Vec<Component> {
    factor_u64(n).into_iter().map(|(p, e)| Component::new(p, e)).collect()
}

/// Generators of `(Z/N)^×` as residues mod `N`, with their orders.
pub fn generators(modulus: u64) -> Result<Vec<(u64, u64)>, Error> {
    if modulus == 0 {
        return Err(Error::BadCharacter("modulus must be positive".into()));
    }
    let mut out = Vec::new();
    for c in components(modulus) {
        let rest = modulus / c.pe;
        for (g, order) in &c.gens {
            out.push((crt_lift(*g, c.pe, rest), *order));
        }
    }
    Ok(out)
}

/// The residue mod `m·rest` that is `g` mod `m` and `1` mod `rest`.
fn crt_lift(g: u64, m: u64, rest: u64) -> u64 {
    if rest == 1 {
        return g % m;
    }
    // x = 1 + rest·t with rest·t ≡ g − 1 (mod m)
    let t = ((g + m - 1) % m) as u128 * inv_mod_u64(rest % m, m) as u128 % m as u128;
    (1 + rest as u128 * t) as u64 % (m * rest)
}

/// A Dirichlet character mod `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    // images of `generators(modulus)`, in order
    images: Vec<Angle>,
}

impl DirichletCharacter {
    /// Validates that each image is a root of unity of order dividing the
    /// order of its generator.
    pub fn new(modulus: u64, images: Vec<Angle>) -> Result<Self, Error> {
        let gens = generators(modulus)?;
        if gens.len() != images.len() {
            return Err(Error::BadCharacter(alloc::format!(
                "modulus {modulus} has {} generators, got {} images",
                gens.len(),
                images.len()
            )));
        }
        for ((g, order), a) in gens.iter().zip(&images) {
            if order % a.den() != 0 {
                return Err(Error::BadCharacter(alloc::format!(
                    "image e({a}) of generator {g} has order not dividing {order}"
                )));
            }
        }
        Ok(DirichletCharacter { modulus, images })
    }

    /// Builds a character from `(generator, image)` pairs, which must list
    /// exactly the canonical generators of `(Z/N)^×`.
    pub fn from_generator_images(modulus: u64, pairs: &[(u64, Angle)]) -> Result<Self, Error> {
        let gens = generators(modulus)?;
        let mut images = Vec::with_capacity(gens.len());
        for (g, _) in &gens {
            let a = pairs
                .iter()
                .find(|(h, _)| h % modulus == *g)
                .map(|(_, a)| *a)
                .ok_or_else(|| Error::BadCharacter(alloc::format!("missing image for generator {g} mod {modulus}")))?;
            images.push(a);
        }
        if pairs.len() != gens.len() {
            return Err(Error::BadCharacter(alloc::format!(
                "expected generators {:?} mod {modulus}",
                gens.iter().map(|g| g.0).collect::<Vec<_>>()
            )));
        }
        DirichletCharacter::new(modulus, images)
    }

    pub fn trivial(modulus: u64) -> Result<Self, Error> {
        let n = generators(modulus)?.len();
        Ok(DirichletCharacter { modulus, images: alloc::vec![Angle::ZERO; n] })
    }

    /// All `φ(N)` characters mod `N`, in lexicographic order of the images.
    pub fn all(modulus: u64) -> Result<Vec<Self>, Error> {
        let gens = generators(modulus)?;
        let mut out = alloc::vec![Vec::new()];
        for (_, order) in &gens {
            let mut next = Vec::new();
            for prefix in &out {
                for k in 0..*order {
                    let mut v: Vec<Angle> = prefix.clone();
                    v.push(Angle::new(k as i128, *order));
                    next.push(v);
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|images| DirichletCharacter { modulus, images }).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `(generator mod N, image angle)` pairs.
    pub fn generator_images(&self) -> Vec<(u64, Angle)> {
        generators(self.modulus)
            .expect("validated modulus")
            .into_iter()
            .zip(&self.images)
            .map(|((g, _), a)| (g, *a))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(Angle::is_zero)
    }

    fn angle_of(&self, mut idx: usize, c: &Component, r: u64) -> Angle {
        let mut a = Angle::ZERO;
        for k in c.log(r) {
            let img = self.images[idx];
            a = a.checked_add(Angle::new(img.num() as i128 * k as i128, img.den())).expect("character angles are small");
            idx += 1;
        }
        a
    }

    /// `χ(u)` for an integer `u`; zero when `gcd(u, N) > 1`.
    pub fn eval(&self, u: i64) -> Cyclotomic {
        let n = self.modulus as i64;
        let r = u.rem_euclid(n) as u64;
        if r.gcd(&self.modulus) != 1 {
            return Cyclotomic::zero();
        }
        let comps = components(self.modulus);
        let mut idx = 0;
        let mut a = Angle::ZERO;
        for c in &comps {
            let part = self.angle_of(idx, c, r % c.pe);
            a = a.checked_add(part).expect("character angles are small");
            idx += c.gens.len();
        }
        Cyclotomic::e(a)
    }

    /// `χ` on a rational whose denominator is prime to `N`.
    pub fn eval_rational(&self, u: &Rational) -> Cyclotomic {
        let n = BigInt::from(self.modulus);
        if !u.denom().gcd(&n).eq(&BigInt::from(1)) {
            return Cyclotomic::zero();
        }
        let inv = u.denom().extended_gcd(&n).x.mod_floor(&n);
        let r = (u.numer() * inv).mod_floor(&n).to_i64().expect("residue below N");
        self.eval(r)
    }

    /// The exponent `e` of `p^e ‖ N`.
    pub fn local_exponent(&self, p: Prime) -> u32 {
        components(self.modulus).iter().find(|c| c.p == p.get()).map_or(0, |c| c.e)
    }

    /// The `p`-component `χ_p(u) = χ(ũ)` with `ũ ≡ u (mod p^e)` and
    /// `ũ ≡ 1` modulo the prime-to-`p` part of `N`, at a p-adic unit `u`.
    pub fn eval_local(&self, p: Prime, u: &Rational) -> Cyclotomic {
        let comps = components(self.modulus);
        let mut idx = 0;
        for c in &comps {
            if c.p == p.get() {
                let r = residue_mod(u, p, c.e);
                return Cyclotomic::e(self.angle_of(idx, c, r));
            }
            idx += c.gens.len();
        }
        Cyclotomic::one()
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi mod {} [", self.modulus)?;
        for (i, (g, a)) in self.generator_images().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g} -> e({a})")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generators(1).unwrap(), []);
        assert_eq!(generators(2).unwrap(), []);
        assert_eq!(generators(3).unwrap(), [(2, 2)]);
        assert_eq!(generators(4).unwrap(), [(3, 2)]);
        assert_eq!(generators(5).unwrap(), [(2, 4)]);
        assert_eq!(generators(8).unwrap(), [(7, 2), (5, 2)]);
        // 12 = 4·3: 3 lifted to 1 mod 3 is 7; 2 lifted to 1 mod 4 is 5
        assert_eq!(generators(12).unwrap(), [(7, 2), (5, 2)]);
    }

    #[test]
    fn character_counts_and_orthogonality() {
        for n in [1u64, 3, 4, 5, 8, 12, 9, 15] {
            let chars = DirichletCharacter::all(n).unwrap();
            let phi = (1..=n).filter(|&u| gcd(u, n) == 1).count();
            assert_eq!(chars.len(), phi, "N = {n}");
            for chi in &chars {
                let s = (1..=n).fold(Cyclotomic::zero(), |acc, u| &acc + &chi.eval(u as i64));
                let expect = if chi.is_trivial() { phi as i64 } else { 0 };
                assert_eq!(s, Cyclotomic::from_rational(rational(expect, 1)), "{chi}");
            }
        }
    }

    #[test]
    fn characters_are_multiplicative() {
        for n in [8u64, 12, 9] {
            for chi in DirichletCharacter::all(n).unwrap() {
                for a in 1..n {
                    for b in 1..n {
                        let lhs = chi.eval((a * b) as i64);
                        let rhs = &chi.eval(a as i64) * &chi.eval(b as i64);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn local_components_multiply_to_the_character() {
        let p2 = Prime::new(2).unwrap();
        let p3 = Prime::new(3).unwrap();
        for chi in DirichletCharacter::all(12).unwrap() {
            for u in [1i64, 5, 7, 11] {
                let x = rational(u, 1);
                let prod = &chi.eval_local(p2, &x) * &chi.eval_local(p3, &x);
                assert_eq!(prod, chi.eval(u));
            }
        }
    }

    #[test]
    fn bad_images_are_rejected() {
        assert!(DirichletCharacter::new(3, alloc::vec![Angle::new(1, 3)]).is_err());
        assert!(DirichletCharacter::new(3, alloc::vec![]).is_err());
        let chi = DirichletCharacter::from_generator_images(3, &[(2, Angle::new(1, 2))]).unwrap();
        assert_eq!(chi.eval(2), -Cyclotomic::one());
        assert!(DirichletCharacter::from_generator_images(3, &[(5, Angle::new(1, 2))]).is_ok());
        assert!(DirichletCharacter::from_generator_images(5, &[(3, Angle::new(1, 4))]).is_err());
    }
}
