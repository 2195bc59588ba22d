use alloc::string::String;

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("conductor {conductor} exceeds the configured limit {limit}")]
    ConductorOverflow { conductor: u128, limit: u64 },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("expected a nonzero rational, got 0")]
    ZeroScale,

    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(String),

    #[error("atom level {level} at p = {p} expands to more than {limit} terms")]
    LevelTooLarge { p: u64, level: i64, limit: u64 },

    #[error("unit coset {center} + {p}^{level} Z_{p} is not inside Z_{p}^x")]
    NotAUnitCoset { p: u64, center: Rational, level: i64 },

    #[error("unit correction {value} at p = {p} is not a p-adic unit")]
    NotAUnit { p: u64, value: Rational },

    #[error("place mismatch: expected p = {expected}, got p = {found}")]
    PlaceMismatch { expected: u64, found: u64 },

    #[error("invalid archimedean atom: {0}")]
    BadArchAtom(String),

    #[error("modulus {modulus} is not a multiple of the required conductor {required}")]
    ModulusTooSmall { modulus: u64, required: u64 },

    #[error("invalid Dirichlet character: {0}")]
    BadCharacter(String),

    #[error("a nontrivial character of the stabilizer requires x = 0")]
    CharacterNeedsZeroOrbit,

    #[error("numeric overflow: {0}")]
    Numeric(String),
}
