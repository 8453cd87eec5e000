//! Moment kernels `K_n(t)`, `n = 0..=4`.
//!
//! The moment functional of the angular reduction is
//! `<X^n>(t) = 2 pi int_0^inf dr r^3 e^{-t r} int_{-1}^{1} dX X^n e^{i r X}`.
//! The kernels here are table-normalized: `<X^n> = 2 pi K_n`, and for odd `n`
//! the true value is `i K_n`. The `2 pi` per kernel is restored in
//! [`crate::dispersion::compute_s`].
//!
//! Two corrections relative to the commonly quoted table, both fixed by the
//! quadrature oracle [`kernel_numeric`]:
//!
//! * `K_0 = 4 (3 t^2 - 1) / (1 + t^2)^3`; the quoted numerator `-4 + 12 t`
//!   is missing the square on `t`. The two agree only at `t = 0`.
//! * The quoted table is already divided by `2 pi` with respect to the
//!   functional's own definition.

use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, rat, Rational};
use crate::output::fmt_num;
use crate::quadrature::{integrate_breakpoints, QuadratureSpec};
use crate::scalar::Scalar;

/// Kernel index `n` in `0..=4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KernelId(u8);

impl KernelId {
    pub const MAX: u32 = 4;

    pub const ALL: [KernelId; 5] = [KernelId(0), KernelId(1), KernelId(2), KernelId(3), KernelId(4)];

    pub fn new(n: u32) -> Result<Self> {
        if n > Self::MAX {
            return Err(Error::Domain(format!("kernel index {n} outside 0..=4")));
        }
        Ok(Self(n as u8))
    }

    pub fn n(self) -> u32 {
        self.0 as u32
    }

    pub fn parity(self) -> Parity {
        if self.0 % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    /// real kernel
    Even,
    /// kernel is `i * magnitude`
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue<T> {
    pub magnitude: T,
    pub parity: Parity,
}

impl<T: Scalar> KernelValue<T> {
    /// Value of the table-normalized kernel as a complex number.
    pub fn to_complex(self) -> Complex<T> {
        match self.parity {
            Parity::Even => Complex::new(self.magnitude, T::zero()),
            Parity::Odd => Complex::new(T::zero(), self.magnitude),
        }
    }
}

/// `arccot t` on `t >= 0`, continuous, `arccot 0 = pi/2`.
pub fn arccot<T: Scalar>(t: T) -> T {
    T::FRAC_PI_2() - t.atan()
}

/// Above this `t` the odd/high kernels switch to a series in `1/t^2`.
const SERIES_T: f64 = 2.0;
const SERIES_TERMS: usize = 64;

/// Closed-form `K_n(t)`.
pub fn kernel_closed<T: Scalar>(n: KernelId, t: T) -> Result<KernelValue<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::Domain(format!("kernel argument t = {t} must be finite and >= 0")));
    }
    let one = T::one();
    let four = T::lit(4.0);
    let t2 = t * t;
    let d3 = (one + t2).powi(3);
    let magnitude = match n.n() {
        0 => four * (T::lit(3.0) * t2 - one) / d3,
        1 => T::lit(16.0) * t / d3,
        2 => four * (t2 - T::lit(3.0)) / d3,
        3 if t > T::lit(SERIES_T) => {
            let y = (t2).recip();
            four * t.recip() * eval_series(&series().k3, y)
        }
        3 => {
            let poly = T::lit(9.0) + T::lit(8.0) * t2 + T::lit(3.0) * t2 * t2;
            four * (t * poly / d3 - T::lit(3.0) * arccot(t))
        }
        4 if t > T::lit(SERIES_T) => eval_series(&series().k4, t2.recip()),
        4 => {
            let poly = T::lit(3.0) + T::lit(27.0) * t2 + T::lit(32.0) * t2 * t2 + T::lit(12.0) * t2 * t2 * t2;
            four * poly / d3 - T::lit(48.0) * t * arccot(t)
        }
        _ => unreachable!("KernelId is range checked"),
    };
    Ok(KernelValue {
        magnitude,
        parity: n.parity(),
    })
}

fn eval_series<T: Scalar>(coeffs: &[f64], y: T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * y + T::lit(c))
}

struct LargeTSeries {
    /// `K_3 = 4/t * sum c_k y^k`, `y = 1/t^2`
    k3: Vec<f64>,
    /// `K_4 = sum c_k y^k`
    k4: Vec<f64>,
}

/// Power series of `K_3`, `K_4` in `y = 1/t^2`, accumulated exactly so the
/// cancelling leading orders drop out before rounding.
fn series() -> &'static LargeTSeries {
    static SERIES: OnceLock<LargeTSeries> = OnceLock::new();
    SERIES.get_or_init(|| {
        // (1 + y)^-3 = sum (k+1)(k+2)/2 (-y)^k ; arctan part: sum (-y)^k/(2k+1)
        let inv_cube = |k: usize| -> Rational {
            let v = int(((k + 1) * (k + 2) / 2) as i64);
            if k % 2 == 0 {
                v
            } else {
                -v
            }
        };
        let atan_part = |k: usize| -> Rational {
            let v = rat(1, (2 * k + 1) as i64);
            if k % 2 == 0 {
                v
            } else {
                -v
            }
        };
        let poly_times_inv_cube = |num: &[i64], k: usize| -> Rational {
            num.iter()
                .enumerate()
                .filter(|(i, _)| *i <= k)
                .fold(Rational::zero(), |acc, (i, &c)| acc + int(c) * inv_cube(k - i))
        };
        let to_f64 = |q: Rational| q.to_f64().expect("series coefficient is finite");
        // K3 * t/4 = (3 + 8y + 9y^2)/(1+y)^3 - 3 arctan-series
        let k3 = (0..SERIES_TERMS)
            .map(|k| to_f64(poly_times_inv_cube(&[3, 8, 9], k) - int(3) * atan_part(k)))
            .collect();
        // K4 = 4 (12 + 32y + 27y^2 + 3y^3)/(1+y)^3 - 48 arctan-series
        let k4 = (0..SERIES_TERMS)
            .map(|k| {
                to_f64(int(4) * poly_times_inv_cube(&[12, 32, 27, 3], k) - int(48) * atan_part(k))
            })
            .collect();
        LargeTSeries { k3, k4 }
    })
}

/// Below this radius [`inner_moment`] sums the Taylor series instead of
/// running the recursion.
pub const TAYLOR_SWITCH_R: f64 = 0.5;
const TAYLOR_TERMS: usize = 24;

/// `m_n(r) = int_{-1}^{1} X^n e^{i r X} dX`.
pub fn inner_moment<T: Scalar>(n: KernelId, r: T) -> Complex<T> {
    if r.abs() < T::lit(TAYLOR_SWITCH_R) {
        inner_moment_taylor(n, r)
    } else {
        inner_moment_recursion(n, r)
    }
}

/// Upward recursion
/// `m_n = (e^{ir} - (-1)^n e^{-ir})/(ir) - n/(ir) m_{n-1}`, `m_0 = 2 sin r / r`.
pub fn inner_moment_recursion<T: Scalar>(n: KernelId, r: T) -> Complex<T> {
    let (s, c) = r.sin_cos();
    let two = T::lit(2.0);
    let mut m = Complex::new(two * s / r, T::zero());
    for k in 1..=n.n() {
        // e^{ir} -+ e^{-ir}: 2i sin r for even k, 2 cos r for odd k
        let boundary = if k % 2 == 0 {
            Complex::new(T::zero(), two * s)
        } else {
            Complex::new(two * c, T::zero())
        };
        let kk = T::from_u32(k).expect("small integer");
        let z = boundary - m * kk;
        // z / (i r) = -i z / r
        m = Complex::new(z.im / r, -z.re / r);
    }
    m
}

/// Taylor series `sum_k (i r)^k / k! * int X^{n+k} dX`.
pub fn inner_moment_taylor<T: Scalar>(n: KernelId, r: T) -> Complex<T> {
    let mut sum = Complex::<T>::zero();
    let mut term = Complex::new(T::one(), T::zero()); // (i r)^k / k!
    let ir = Complex::new(T::zero(), r);
    for k in 0..TAYLOR_TERMS {
        let p = n.n() as usize + k;
        if p % 2 == 0 {
            sum = sum + term * (T::lit(2.0) / T::from_usize_lossy(p + 1));
        }
        term = term * ir / T::from_usize_lossy(k + 1);
    }
    sum
}

/// Smallest `t` accepted by the quadrature oracle; below it the `e^{-t r}`
/// envelope is too weak for plain Gauss-Kronrod.
pub const ORACLE_MIN_T: f64 = 1e-3;

// Upper cut of the oracle's radial integral (in s = t r); the discarded
// tail of s^3 e^-s / t^4 is below 1e-16 for every admissible t.
const ORACLE_S_MAX: f64 = 80.0;

/// Quadrature oracle: `int_0^inf r^3 e^{-t r} m_n(r) dr`.
///
/// Real and imaginary parts are integrated separately; the part that must
/// vanish by parity is checked against the requested absolute tolerance (or
/// the achieved error estimate, whichever is larger).
pub fn kernel_numeric<T: Scalar>(
    n: KernelId,
    t: T,
    spec: &QuadratureSpec<T>,
) -> Result<KernelValue<T>> {
    if !(t >= T::lit(ORACLE_MIN_T)) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "kernel oracle needs finite t >= {ORACLE_MIN_T}, got {t}"
        )));
    }
    // r = s / t pulls the decay scale to 1
    let scale = t.powi(4).recip();
    let integrand = |s: T, take_re: bool| {
        let m = inner_moment(n, s / t);
        let w = s * s * s * (-s).exp() * scale;
        if take_re {
            w * m.re
        } else {
            w * m.im
        }
    };
    // inner_moment(s/t) oscillates with period 2 pi t in s; start from
    // panels of about that width so the error estimate sees every wiggle.
    // Mapping the half line instead crowds the oscillations into the last
    // panel and the Kronrod estimate turns optimistic.
    let s_max = T::lit(ORACLE_S_MAX);
    let budget = (spec.max_subdivisions / 2).max(1);
    let wanted = (s_max / (T::TAU() * t)).ceil().as_f64() as usize;
    let panels = wanted.clamp(1, budget);
    let step = s_max / T::from_usize_lossy(panels);
    let mut points: Vec<T> = (0..panels).map(|k| step * T::from_usize_lossy(k)).collect();
    points.push(s_max);
    let re = integrate_breakpoints(|s| integrand(s, true), &points, spec)?.require_converged(spec)?;
    let im = integrate_breakpoints(|s| integrand(s, false), &points, spec)?.require_converged(spec)?;
    let (kept, discarded) = match n.parity() {
        Parity::Even => (re, im),
        Parity::Odd => (im, re),
    };
    let tolerance = spec.abs_tol.max(discarded.error_estimate);
    if discarded.value.abs() > tolerance {
        return Err(Error::Parity {
            discarded: discarded.value.as_f64(),
            tolerance: tolerance.as_f64(),
        });
    }
    Ok(KernelValue {
        magnitude: kept.value,
        parity: n.parity(),
    })
}

/// CSV table `t,K0,K1,K2,K3,K4` over the given abscissae.
pub fn kernel_table_csv(ts: &[f64]) -> Result<String> {
    let mut out = String::new();
    out.push_str("# odd kernels K1, K3 are imaginary; columns hold their real magnitudes (<X^n> = 2*pi*i*K_n)\n");
    out.push_str("t,K0,K1,K2,K3,K4\n");
    for &t in ts {
        let mut row = vec![fmt_num(t)];
        for n in KernelId::ALL {
            row.push(fmt_num(kernel_closed(n, t)?.magnitude));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// `n` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn k(n: u32) -> KernelId {
        KernelId::new(n).unwrap()
    }

    #[test]
    fn kernel_id_range() {
        assert!(KernelId::new(5).is_err());
        assert_eq!(k(3).parity(), Parity::Odd);
        assert_eq!(k(4).parity(), Parity::Even);
    }

    #[test]
    fn closed_form_reference_points() {
        let v = kernel_closed(k(0), 0.0).unwrap();
        assert_eq!(v.magnitude, -4.0);
        assert_eq!(v.parity, Parity::Even);
        let v = kernel_closed(k(3), 0.0).unwrap();
        assert!((v.magnitude + 6.0 * PI).abs() < 1e-14);
        assert_eq!(v.parity, Parity::Odd);
        assert!((kernel_closed(k(0), 1.0f64).unwrap().magnitude - 1.0).abs() < 1e-15);
        assert!((kernel_closed(k(1), 1.0f64).unwrap().magnitude - 2.0).abs() < 1e-15);
        assert!((kernel_closed(k(2), 1.0f64).unwrap().magnitude + 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_t_rejected() {
        assert!(kernel_closed(k(0), -1e-9).is_err());
        assert!(kernel_closed(k(0), f64::NAN).is_err());
    }

    #[test]
    fn series_branch_is_continuous() {
        // K4(2 (1 + 1e-12)) to 40 digits
        let reference = 0.001_829_535_922_749_072_967_3;
        let t = SERIES_T * (1.0 + 1e-12);
        let series = kernel_closed(k(4), t).unwrap().magnitude;
        assert!(((series - reference) / reference).abs() < 1e-14, "series {series}");
        // the direct form just below the switch loses ~4 digits to cancellation
        let below = kernel_closed(k(4), SERIES_T).unwrap().magnitude;
        let at_two = 0.001_829_535_922_612_843_4;
        assert!(((below - at_two) / at_two).abs() < 1e-11, "direct {below}");
        let k3_above = kernel_closed(k(3), t).unwrap().magnitude;
        let k3_below = kernel_closed(k(3), SERIES_T).unwrap().magnitude;
        assert!(((k3_above - k3_below) / k3_below).abs() < 1e-10);
    }

    #[test]
    fn large_t_leading_orders() {
        // K3 ~ 96/(35 t^7)... check only the 1/t^2 decay bound and sign
        for t in [10.0, 100.0, 1e4] {
            let k4 = kernel_closed(k(4), t).unwrap().magnitude;
            let k3 = kernel_closed(k(3), t).unwrap().magnitude;
            assert!(k4 > 0.0 && k4 * t * t < 1.0, "K4({t}) = {k4}");
            assert!(k3 > 0.0 && k3 * t * t < 1.0, "K3({t}) = {k3}");
        }
        // leading terms from the exact series: K4 ~ (12/5)/t^4, K3 ~ (48/5)/t^5...
        let t = 1e3f64;
        let k4 = kernel_closed(k(4), t).unwrap().magnitude;
        assert!((k4 * t.powi(4) - 2.4).abs() < 1e-4);
    }

    #[test]
    fn inner_moment_examples() {
        let m0 = inner_moment(k(0), PI);
        assert!(m0.norm() < 1e-15);
        let m1 = inner_moment(k(1), 1e-4f64);
        assert!(m1.re.abs() < 1e-20);
        assert!((m1.im / 1e-4 - 2.0 / 3.0).abs() < 1e-8);
        let m2 = inner_moment(k(2), 1.0);
        let want = 2.0 * (2.0 * 1f64.cos() - 1f64.sin());
        assert!((m2.re - want).abs() < 1e-15);
        assert!((m2.re - 0.478_267_253_856_765_9).abs() < 1e-15);
        assert_eq!(m2.im, 0.0);
    }

    #[test]
    fn recursion_and_taylor_agree_at_switch() {
        let r = TAYLOR_SWITCH_R;
        for n in KernelId::ALL {
            let a = inner_moment_recursion(n, r);
            let b = inner_moment_taylor(n, r);
            assert!((a - b).norm() / b.norm() < 1e-12, "n={}", n.n());
        }
    }

    #[test]
    fn numeric_oracle_reference_points() {
        let spec = QuadratureSpec::<f64>::with_tol(1e-12).max_subdivisions(4000);
        let v = kernel_numeric(k(0), 1.0, &spec).unwrap();
        assert!((v.magnitude - 1.0).abs() < 1e-10);
        let v = kernel_numeric(k(1), 1.0, &spec).unwrap();
        assert_eq!(v.parity, Parity::Odd);
        assert!((v.magnitude - 2.0).abs() < 1e-10);
        let v = kernel_numeric(k(2), 1.0, &spec).unwrap();
        assert!((v.magnitude + 1.0).abs() < 1e-10);
    }

    #[test]
    fn numeric_oracle_rejects_tiny_t() {
        let spec = QuadratureSpec::with_tol(1e-10);
        assert!(kernel_numeric(k(0), 1e-4, &spec).is_err());
    }

    #[test]
    fn csv_layout() {
        let csv = kernel_table_csv(&[1.0]).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(lines.next().unwrap(), "t,K0,K1,K2,K3,K4");
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row.len(), 6);
        assert_eq!(row[1], 1.0);
        assert_eq!(row[2], 2.0);
    }

    #[test]
    fn single_precision_closed_form() {
        let v = kernel_closed(k(2), 1.0f32).unwrap();
        assert!((v.magnitude + 1.0).abs() < 1e-6);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-2, 1e2, 40);
        assert_eq!(g.len(), 40);
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[39], 1e2);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
