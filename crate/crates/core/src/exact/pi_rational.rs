use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exact number `coeff * pi^pi_power`.
///
/// Zero is stored with `pi_power = 0`, so equality is plain field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiRational {
    coeff: Rational,
    pi_power: i32,
}

impl PiRational {
    pub fn new(coeff: Rational, pi_power: i32) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Self { coeff, pi_power }
        }
    }

    pub fn rational(coeff: Rational) -> Self {
        Self::new(coeff, 0)
    }

    pub fn zero() -> Self {
        Self {
            coeff: Rational::zero(),
            pi_power: 0,
        }
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    /// `pi^n`.
    pub fn pi_pow(n: i32) -> Self {
        Self::new(Rational::one(), n)
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn pi_power(&self) -> i32 {
        self.pi_power
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Exact sum. Only defined when both terms carry the same power of pi
    /// (a zero term is compatible with anything).
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.pi_power != other.pi_power {
            return Err(Error::PiPowerMismatch(self.pi_power, other.pi_power));
        }
        Ok(Self::new(&self.coeff + &other.coeff, self.pi_power))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(&self.coeff * factor, self.pi_power)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::new(
            &self.coeff / &other.coeff,
            self.pi_power - other.pi_power,
        ))
    }

    pub fn pow(&self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let base = if n > 0 {
            self.coeff.clone()
        } else {
            self.coeff.recip()
        };
        let mut acc = Rational::one();
        for _ in 0..n.unsigned_abs() {
            acc *= &base;
        }
        Self::new(acc, self.pi_power * n)
    }

    /// Nearest floating point value. The rational part is converted first,
    /// then multiplied by `pi^n`.
    pub fn to_float<T: Scalar>(&self) -> T {
        let q = self.coeff.to_f64().unwrap_or(f64::NAN);
        T::lit(q) * T::PI().powi(self.pi_power)
    }
}

impl Mul for &PiRational {
    type Output = PiRational;
    fn mul(self, rhs: &PiRational) -> PiRational {
        PiRational::new(&self.coeff * &rhs.coeff, self.pi_power + rhs.pi_power)
    }
}

impl Mul for PiRational {
    type Output = PiRational;
    fn mul(self, rhs: PiRational) -> PiRational {
        &self * &rhs
    }
}

impl Div for &PiRational {
    type Output = PiRational;
    /// Panics on division by zero; use [`PiRational::checked_div`] otherwise.
    fn div(self, rhs: &PiRational) -> PiRational {
        self.checked_div(rhs).expect("division by zero pi-rational")
    }
}

impl Neg for PiRational {
    type Output = PiRational;
    fn neg(self) -> PiRational {
        PiRational::new(-self.coeff, self.pi_power)
    }
}

impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = if self.coeff.denom().is_one() {
            self.coeff.numer().to_string()
        } else {
            format!("{}/{}", self.coeff.numer(), self.coeff.denom())
        };
        match self.pi_power {
            0 => write!(f, "{q}"),
            1 => write!(f, "{q}*pi"),
            n => {
                if self.coeff.is_negative() && n != 0 {
                    write!(f, "({q})*pi^{n}")
                } else {
                    write!(f, "{q}*pi^{n}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn zero_is_canonical() {
        let z = PiRational::new(int(0), 5);
        assert_eq!(z, PiRational::zero());
        assert_eq!(z.pi_power(), 0);
    }

    #[test]
    fn add_requires_matching_power() {
        let a = PiRational::new(rat(1, 2), 3);
        let b = PiRational::new(rat(1, 3), 3);
        assert_eq!(a.checked_add(&b).unwrap(), PiRational::new(rat(5, 6), 3));
        let c = PiRational::new(int(1), 2);
        assert_eq!(a.checked_add(&c), Err(Error::PiPowerMismatch(3, 2)));
        assert_eq!(a.checked_add(&PiRational::zero()).unwrap(), a);
    }

    #[test]
    fn mul_div_track_pi_power() {
        let s1 = PiRational::new(int(92), 3);
        let inv = PiRational::new(rat(1, 64), -6);
        let p = &s1 * &inv;
        assert_eq!(p, PiRational::new(rat(23, 16), -3));
        assert_eq!(&p / &inv, s1);
        assert_eq!(
            PiRational::zero().checked_div(&PiRational::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn pow_handles_negative_exponent() {
        let two_pi = PiRational::new(int(2), 1);
        assert_eq!(two_pi.pow(-6), PiRational::new(rat(1, 64), -6));
        assert_eq!(two_pi.pow(0), PiRational::one());
    }

    #[test]
    fn to_float_matches_direct_evaluation() {
        let x = PiRational::new(int(92), 3);
        let v: f64 = x.to_float();
        assert!((v - 92.0 * std::f64::consts::PI.powi(3)).abs() < 1e-10);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(PiRational::new(rat(23, 16), -1).to_string(), "23/16*pi^-1");
        assert_eq!(PiRational::new(int(7), 0).to_string(), "7");
        assert_eq!(PiRational::new(int(-2), 1).to_string(), "-2*pi");
    }
}
