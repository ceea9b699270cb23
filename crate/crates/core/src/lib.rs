//! Finite-dimensional operator algebras, n-potents, and n-homomorphisms.
//!
//! The library models finite-dimensional complex algebras (direct sums of
//! full matrix blocks, plus strictly-upper-triangular nilpotent algebras),
//! linear maps between them, and the decomposition theory of n-potents and
//! involutive n-homomorphisms: partitions of unity, splittings into
//! orthogonal *-homomorphisms, complete positivity via Choi matrices, and
//! norm contractivity. Everything is numeric: each construction reports the
//! residuals it achieved, and each verification takes an explicit tolerance.
//!
//! Modules:
//!
//! - [`algebra`] — dense complex matrices tagged with an algebra descriptor.
//! - [`npotent`] — roots of `x^n = x`, interpolation polynomials, partitions
//!   of unity, and the classification of self-adjoint n-potents.
//! - [`nhom`] — linear maps as dense matrices on vectorized coordinates;
//!   verification and decomposition of n-homomorphisms.
//! - [`positivity`] — amplification, Choi matrices, complete positivity,
//!   generalized C*-identities, solvability, spectral inclusion, and
//!   contractivity checks.
//! - [`generate`] — seeded random elements and map instances.
//! - [`json`] — the JSON wire formats used by the CLI and fixtures.

pub mod algebra;
pub mod error;
pub mod generate;
pub mod json;
pub mod linalg;
pub mod nhom;
pub mod npotent;
pub mod positivity;

pub use algebra::{AlgebraDescriptor, AlgebraElement, CMatrix, Complex64};
pub use error::{Error, Result};
pub use nhom::LinearMapRep;

/// Default relative tolerance used when callers do not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Scale factor for relative tolerances: `max(1, x)`.
///
/// All verification predicates in this crate accept a residual `r` when
/// `r <= tol * rel_scale(norm)`, so tolerances behave absolutely near zero
/// and relatively for large operands.
#[inline]
pub fn rel_scale(x: f64) -> f64 {
    x.max(1.0)
}
