//! Exact rational layer: the angular reduction of the two-photon dispersion
//! integrals and numbers of the form `q * pi^n`.
//!
//! Nothing in here touches floating point except the explicit `to_float`
//! conversions on [`PiRational`].

mod angular;
mod pi_rational;

pub use angular::{
    expand_u_polynomial, phi_average, reduce_to_moments, AngularMonomial, AngularPolynomial,
    MomentPairTable, PolynomialFamily, MAX_U_DEGREE,
};
pub use pi_rational::PiRational;

use num_bigint::BigInt;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
