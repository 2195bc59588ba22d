//! Exact and certified computation of both sides of the trace formula for
//! the group `G = A¹ ⋉ A` over `Q` with lattice `Γ = Q^× ⋉ Q`.
//!
//! Finite-place quantities are exact: rationals and cyclotomic numbers, with
//! Schwartz-Bruhat functions on `Q_p` stored in a canonical twisted-ball
//! normal form. The real place uses Gaussian atoms, whose Fourier transforms
//! and integrals are closed-form and whose lattice sums carry certified tail
//! bounds. Global assembly is floating point with explicit error radii.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! tool and random test-function generation live in the `adele-trace` crate.
//!
//! Character conventions: `ψ_p(x) = e(frac_p(x))` at every prime and
//! `ψ_∞(x) = e(−x)` at the real place, so that `ψ = ∏_v ψ_v` is trivial on
//! `Q` and `Q ⊂ A` is self-dual.

#![no_std]

extern crate alloc;

pub mod arch;
pub mod character;
pub mod error;
pub mod exact;
pub mod geometric;
pub mod hecke;
pub mod localsb;
pub mod numeric;
pub mod padic;
pub mod spectral;
pub mod verify;

pub use arch::{ArchAtom, ArchFunction};
pub use character::DirichletCharacter;
pub use error::Error;
pub use exact::{Angle, ComplexApprox, Cyclotomic, Rational};
pub use geometric::GeometricReport;
pub use hecke::{GroupPoint, HeckeAtom, HeckeElement, LocalFactor};
pub use localsb::{LocalSb, TwistedBall, UnitFunction};
pub use numeric::{BoundedValue, Truncation};
pub use padic::{PadicBall, Prime};
pub use spectral::{CharDecomposition, SpectralReport};
pub use verify::{PoissonInput, PoissonReport, TraceCheck, Verdict};

pub type Result<T, E = Error> = core::result::Result<T, E>;
