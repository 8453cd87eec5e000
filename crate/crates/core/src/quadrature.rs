//! Adaptive Gauss-Kronrod quadrature on `[0, inf)`.
//!
//! The half line is mapped onto `(0, 1)` and integrated with the 10-point
//! Gauss / 21-point Kronrod pair. The panel with the largest error estimate is
//! bisected until the total estimate meets the tolerance. Ties are broken by
//! the leftmost panel, so the subdivision sequence (and every bit of the
//! result) is a pure function of the integrand and the spec.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Change of variables taking `u in (0, 1)` to `t in (0, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mapping {
    /// `t = u / (1 - u)`; suits algebraic decay.
    #[default]
    Rational,
    /// `t = -ln(1 - u)`; suits exponential decay.
    Exponential,
}

impl Mapping {
    #[inline]
    fn apply<T: Scalar>(self, u: T) -> (T, T) {
        let one_minus = T::one() - u;
        match self {
            Mapping::Rational => (u / one_minus, T::one() / (one_minus * one_minus)),
            Mapping::Exponential => (-one_minus.ln(), T::one() / one_minus),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    pub mapping: Mapping,
}

impl<T: Scalar> QuadratureSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_subdivisions: 2000,
            mapping: Mapping::Rational,
        }
    }

    /// Same relative and absolute tolerance.
    pub fn with_tol(tol: T) -> Self {
        Self::new(tol, tol)
    }

    pub fn mapping(mut self, mapping: Mapping) -> Self {
        self.mapping = mapping;
        self
    }

    pub fn max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) {
            return Err(Error::Domain(format!(
                "tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Domain("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    /// Tolerance the error estimate is held to for a given value.
    pub fn target(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureSpec<f64> {
    fn default() -> Self {
        Self::new(1e-10, 1e-12)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Scalar> IntegrationResult<T> {
    /// Turns a non-converged result into [`Error::Accuracy`].
    pub fn require_converged(self, spec: &QuadratureSpec<T>) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Accuracy {
                estimate: self.error_estimate.as_f64(),
                requested: spec.target(self.value).as_f64(),
            })
        }
    }
}

/// Integrates `f` over `(0, inf)`.
///
/// Non-convergence is reported through `converged = false`; a NaN from `f`
/// aborts immediately.
pub fn integrate_half_line<T, F>(f: F, spec: &QuadratureSpec<T>) -> Result<IntegrationResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    spec.validate()?;
    let mapping = spec.mapping;
    let g = |u: T| -> Result<T> {
        let (t, jac) = mapping.apply(u);
        if !t.is_finite() || !jac.is_finite() {
            // only reachable for u rounding to 1
            return Ok(T::zero());
        }
        let y = f(t);
        if y.is_nan() {
            return Err(Error::NotANumber(t.as_f64()));
        }
        Ok(y * jac)
    };
    adaptive(g, T::zero(), T::one(), spec)
}

/// Integrates `f` over the finite interval `[a, b]` with the same engine.
pub fn integrate_interval<T, F>(
    f: F,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegrationResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("interval endpoints must be finite".into()));
    }
    let g = |x: T| -> Result<T> {
        let y = f(x);
        if y.is_nan() {
            Err(Error::NotANumber(x.as_f64()))
        } else {
            Ok(y)
        }
    };
    adaptive(g, a, b, spec)
}

/// Integrates `f` over `[points[0], points[last]]`, starting the adaptive
/// bisection from the given panels. Useful when the integrand oscillates on
/// a known scale, so that no single starting panel undersamples it.
pub fn integrate_breakpoints<T, F>(f: F, points: &[T], spec: &QuadratureSpec<T>) -> Result<IntegrationResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    spec.validate()?;
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("breakpoints must be finite and strictly increasing".into()));
    }
    if points.len() > spec.max_subdivisions {
        return Err(Error::Domain(format!(
            "{} starting panels exceed max_subdivisions = {}",
            points.len() - 1,
            spec.max_subdivisions
        )));
    }
    let g = |x: T| -> Result<T> {
        let y = f(x);
        if y.is_nan() {
            Err(Error::NotANumber(x.as_f64()))
        } else {
            Ok(y)
        }
    };
    adaptive_from(g, points, spec)
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Panel<T> {}

impl<T: Scalar> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Panel<T> {
    // max-heap: larger error first, then smaller left endpoint
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .as_f64()
            .total_cmp(&other.error.as_f64())
            .then_with(|| other.a.as_f64().total_cmp(&self.a.as_f64()))
    }
}

fn adaptive<T, G>(g: G, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<IntegrationResult<T>>
where
    T: Scalar,
    G: Fn(T) -> Result<T>,
{
    adaptive_from(g, &[a, b], spec)
}

fn adaptive_from<T, G>(g: G, points: &[T], spec: &QuadratureSpec<T>) -> Result<IntegrationResult<T>>
where
    T: Scalar,
    G: Fn(T) -> Result<T>,
{
    let mut evaluations = 0usize;
    let mut total = T::zero();
    let mut total_err = T::zero();
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        let panel = kronrod21(&g, w[0], w[1], &mut evaluations)?;
        total = total + panel.value;
        total_err = total_err + panel.error;
        heap.push(panel);
    }

    while total_err > spec.target(total) && heap.len() < spec.max_subdivisions {
        let worst = heap.pop().expect("heap is never empty");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            // panel cannot be split further in this precision
            heap.push(worst);
            break;
        }
        let left = kronrod21(&g, worst.a, mid, &mut evaluations)?;
        let right = kronrod21(&g, mid, worst.b, &mut evaluations)?;
        total = total - worst.value + left.value + right.value;
        total_err = total_err - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in a fixed left-to-right order; the running sums above only steer
    // the loop.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.as_f64().total_cmp(&q.a.as_f64()));
    let value: T = panels.iter().map(|p| p.value).sum();
    let error_estimate: T = panels.iter().map(|p| p.error).sum();
    Ok(IntegrationResult {
        value,
        error_estimate,
        evaluations,
        converged: error_estimate <= spec.target(value),
    })
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

// Gauss weights for the odd-indexed XGK nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn kronrod21<T, G>(g: &G, a: T, b: T, evaluations: &mut usize) -> Result<Panel<T>>
where
    T: Scalar,
    G: Fn(T) -> Result<T>,
{
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let fc = g(center)?;
    let mut kronrod = fc * T::lit(WGK[10]);
    let mut gauss = T::zero();
    let mut abs_sum = (fc * T::lit(WGK[10])).abs();
    for j in 0..10 {
        let dx = half * T::lit(XGK[j]);
        let f1 = g(center - dx)?;
        let f2 = g(center + dx)?;
        kronrod = kronrod + T::lit(WGK[j]) * (f1 + f2);
        abs_sum = abs_sum + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    *evaluations += 21;
    let value = kronrod * half;
    // Rounding floor: a panel cannot be known better than a few ulps of the
    // integral of |f| over it.
    let floor = T::epsilon() * T::lit(4.0) * abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(floor);
    Ok(Panel { a, b, value, error })
}
