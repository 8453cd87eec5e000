//! Retarded van der Waals (Casimir-Polder) interaction strength.
//!
//! * [`exact`]: exact angular reduction of the two-photon integrals into
//!   moment-pair tables, and `q * pi^n` arithmetic.
//! * [`kernels`]: closed-form moment kernels and their quadrature oracle.
//! * [`quadrature`]: deterministic adaptive integration on the half line.
//! * [`dispersion`]: the `S_j` integrals, assembly of kappa, conventions and
//!   potential curves.
//! * [`atom`]: hydrogen ground state on a radial grid and its dipole moments.
//! * [`operator_lab`]: ground-state operator identities checked on a truncated
//!   oscillator.
//!
//! Numeric code is generic over [`Scalar`] (`f32`/`f64`); the aliases below fix
//! it to `f64`.

pub mod atom;
pub mod dispersion;
pub mod error;
pub mod exact;
pub mod kernels;
pub mod linalg;
pub mod operator_lab;
pub mod output;
pub mod quadrature;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use exact::{MomentPairTable, PiRational, PolynomialFamily, Rational};
pub use scalar::Scalar;

pub type QuadratureSpecF64 = quadrature::QuadratureSpec<f64>;
pub type IntegrationResultF64 = quadrature::IntegrationResult<f64>;
pub type KernelValueF64 = kernels::KernelValue<f64>;
pub type DipoleMomentsF64 = dispersion::DipoleMoments<f64>;
pub type KappaBreakdownF64 = dispersion::KappaBreakdown<f64>;
pub type UnitSystemF64 = dispersion::UnitSystem<f64>;
pub type RadialGridF64 = atom::RadialGrid<f64>;
pub type AtomSolutionF64 = atom::AtomSolution<f64>;
pub type OperatorSetF64 = operator_lab::OperatorSet<f64>;
