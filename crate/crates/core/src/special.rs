//! Sine integral.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `Si(x) = int_0^x sin(t)/t dt`.
///
/// Power series up to `|x| = 2`, continued fraction for `E1(ix)` beyond
/// (modified Lentz), as in the classic cisi routine. Accurate to a few ulp
/// in double precision.
pub fn sine_integral<T: Scalar>(x: T) -> Result<T> {
    if x.is_nan() {
        return Err(Error::NotANumber(f64::NAN));
    }
    if x < T::zero() {
        return sine_integral(-x).map(|v| -v);
    }
    if x.is_infinite() {
        return Ok(T::FRAC_PI_2());
    }
    let eps = T::epsilon();
    if x <= T::lit(2.0) {
        // sum (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
        let x2 = x * x;
        let mut term = x; // x^{2k+1}/(2k+1)!
        let mut sum = x;
        let mut k = 0usize;
        loop {
            k += 1;
            let a = T::from_usize_lossy(2 * k);
            let b = T::from_usize_lossy(2 * k + 1);
            term = -term * x2 / (a * b);
            let contrib = term / b;
            sum = sum + contrib;
            if contrib.abs() <= eps * sum.abs() || k > 60 {
                break;
            }
        }
        return Ok(sum);
    }
    // E1(ix) = -Ci(x) + i(Si(x) - pi/2); continued fraction in b = 1 + ix
    let tiny = T::min_positive_value().sqrt();
    let one = Complex::new(T::one(), T::zero());
    let mut b = Complex::new(T::one(), x);
    let mut c = Complex::new(tiny.recip(), T::zero());
    let mut d = one / b;
    let mut h = d;
    let mut converged = false;
    for i in 2..200usize {
        let fi = T::from_usize_lossy(i - 1);
        let a = -(fi * fi);
        b = b + Complex::new(T::lit(2.0), T::zero());
        d = one / (d * a + b);
        c = b + one / c * a;
        let del = c * d;
        h = h * del;
        if (del.re - T::one()).abs() + del.im.abs() < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Solver(format!("sine integral continued fraction at x = {x}")));
    }
    let (s, co) = x.sin_cos();
    h = Complex::new(co, -s) * h;
    Ok(T::FRAC_PI_2() + h.im)
}
