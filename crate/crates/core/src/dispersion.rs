//! The `S_j` integrals, assembly of kappa, and potential curves.
//!
//! The `S_j` integrals are `S = 4 pi^2 int_0^inf sum c_ab sigma_ab K_a K_b dt`.
//! Here `c_ab` comes from the reduced table, `K_n` are the table-normalized
//! kernels, and `sigma_ab = -1` for two odd kernels (each carries an `i`).

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, rat, MomentPairTable, PiRational};
use crate::kernels::{kernel_closed, KernelId, Parity};
use crate::output::{fmt_num, sig17};
use crate::quadrature::{integrate_half_line, IntegrationResult, QuadratureSpec};
use crate::scalar::Scalar;

/// `S` for a reduced table, with the quadrature diagnostics.
pub fn compute_s_detailed<T: Scalar>(
    table: &MomentPairTable,
    spec: &QuadratureSpec<T>,
) -> Result<IntegrationResult<T>> {
    let mut terms = Vec::with_capacity(table.len());
    for ((a, b), q) in table.iter() {
        let (ka, kb) = (KernelId::new(a)?, KernelId::new(b)?);
        let odd_pair = ka.parity() == Parity::Odd && kb.parity() == Parity::Odd;
        let c = PiRational::rational(q.clone()).to_float::<T>();
        terms.push((ka, kb, if odd_pair { -c } else { c }));
    }
    let integrand = |t: T| {
        terms
            .iter()
            .map(|&(ka, kb, c)| {
                // t >= 0 always holds under the mappings
                let a = kernel_closed(ka, t).map(|k| k.magnitude).unwrap_or(T::nan());
                let b = kernel_closed(kb, t).map(|k| k.magnitude).unwrap_or(T::nan());
                c * a * b
            })
            .sum::<T>()
    };
    let res = integrate_half_line(integrand, spec)?.require_converged(spec)?;
    let four_pi2 = T::lit(4.0) * T::PI() * T::PI();
    Ok(IntegrationResult {
        value: four_pi2 * res.value,
        error_estimate: four_pi2 * res.error_estimate,
        ..res
    })
}

pub fn compute_s<T: Scalar>(table: &MomentPairTable, spec: &QuadratureSpec<T>) -> Result<T> {
    compute_s_detailed(table, spec).map(|r| r.value)
}

/// Closed-form values `S_1, S_2, S_3 = (92, 208, 256) pi^3`.
pub fn s_targets() -> [PiRational; 3] {
    [92, 208, 256].map(|n| PiRational::new(int(n), 3))
}

fn dot<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal transverse pair `(e1, e2)` with `(e1, e2, k)` right-handed.
pub fn dreibein<T: Scalar>(k: &[T; 3]) -> Result<([T; 3], [T; 3])> {
    let norm = dot(k, k).sqrt();
    if !((norm - T::one()).abs() <= T::lit(1e-12).max(T::epsilon() * T::lit(8.0))) {
        return Err(Error::Domain(format!("direction must be a unit vector, |k| = {norm}")));
    }
    // helper axis least aligned with k
    let mut axis = [T::zero(); 3];
    let i = (0..3)
        .min_by(|&i, &j| k[i].abs().partial_cmp(&k[j].abs()).expect("finite"))
        .expect("three axes");
    axis[i] = T::one();
    let e1 = cross(k, &axis);
    let n1 = dot(&e1, &e1).sqrt();
    let e1 = e1.map(|v| v / n1);
    let e2 = cross(k, &e1);
    Ok((e1, e2))
}

/// `(sum_{l1 l2} (e1 . e2)^2, sum_{l1} (e1 . k2)^2)` from explicit
/// polarization vectors; equals `(1 + u^2, 1 - u^2)` with `u = k1 . k2`.
pub fn polarization_sum_check<T: Scalar>(k1: &[T; 3], k2: &[T; 3]) -> Result<(T, T)> {
    let (a1, a2) = dreibein(k1)?;
    let (b1, b2) = dreibein(k2)?;
    let mut transverse = T::zero();
    for e in [&a1, &a2] {
        for f in [&b1, &b2] {
            transverse = transverse + dot(e, f).powi(2);
        }
    }
    let longitudinal = dot(&a1, k2).powi(2) + dot(&a2, k2).powi(2);
    Ok((transverse, longitudinal))
}

/// How `alpha_E` is read off the resolvent element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
pub enum Convention {
    /// `alpha_E = 2 <z (H-E)^-1 z>`, as defined in the source.
    #[default]
    #[serde(rename = "paper-factor-2")]
    PaperFactor2,
    /// `alpha_E = <z (H-E)^-1 z>`, matching the quoted "~ 9/4".
    #[serde(rename = "no-factor-2")]
    NoFactor2,
}

impl Convention {
    pub const ALL: [Self; 2] = [Self::PaperFactor2, Self::NoFactor2];

    pub fn factor(self) -> u32 {
        match self {
            Self::PaperFactor2 => 2,
            Self::NoFactor2 => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PaperFactor2 => "paper-factor-2",
            Self::NoFactor2 => "no-factor-2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dimensionless dipole moments. Physical atoms have `alpha_m <= 0`; the
/// field is not clamped so the single-term checks can use `alpha_m = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DipoleMoments<T> {
    pub alpha_e: T,
    pub alpha_m: T,
    pub convention: Convention,
}

impl<T: Scalar> DipoleMoments<T> {
    pub fn new(alpha_e: T, alpha_m: T, convention: Convention) -> Self {
        Self {
            alpha_e,
            alpha_m,
            convention,
        }
    }

    pub fn is_diamagnetic(&self) -> bool {
        self.alpha_m <= T::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Scheme {
    #[serde(rename = "this-paper")]
    ThisPaper,
    #[serde(rename = "feinberg-sucher-boyer")]
    FeinbergSucherBoyer,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::ThisPaper => "this-paper",
            Self::FeinbergSucherBoyer => "feinberg-sucher-boyer",
        }
    }

    /// `(EE, EM, MM)` coefficients in front of `alpha_E^2`, `alpha_E alpha_M`,
    /// `alpha_M^2` in the energy, with the `(1/2 pi)^2` stripped.
    pub fn coefficients(self) -> [PiRational; 3] {
        match self {
            Self::ThisPaper => [ee_coefficient(), per_pi(26, 1), per_pi(64, 1)],
            Self::FeinbergSucherBoyer => [ee_coefficient(), per_pi(7, 8), ee_coefficient()],
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn per_pi(num: i64, den: i64) -> PiRational {
    PiRational::new(rat(num, den), -1)
}

/// `23/(16 pi)`: the electric-electric coefficient, common to both schemes.
pub fn ee_coefficient() -> PiRational {
    per_pi(23, 16)
}

/// Factor from the stripped energy coefficients to the dimensionless
/// strength: the `(1/2 pi)^2` times `e^2 -> 4 pi` on both moments.
pub fn dimensionless_factor() -> PiRational {
    &PiRational::new(int(2), 1).pow(-2) * &PiRational::new(int(4), 1).pow(2)
}

/// Coefficients of `alpha~_E^2`, `alpha~_E alpha~_M`, `alpha~_M^2` in kappa.
pub fn kappa_coefficients(scheme: Scheme) -> [PiRational; 3] {
    let f = dimensionless_factor();
    scheme.coefficients().map(|c| &c * &f)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaBreakdown<T> {
    pub ee: T,
    pub em: T,
    pub mm: T,
    pub total: T,
    pub scheme: Scheme,
}

fn breakdown<T: Scalar>(m: &DipoleMoments<T>, scheme: Scheme) -> KappaBreakdown<T> {
    let [c_ee, c_em, c_mm] = kappa_coefficients(scheme).map(|c| c.to_float::<T>());
    let ee = c_ee * m.alpha_e * m.alpha_e;
    let em = c_em * m.alpha_e * m.alpha_m;
    let mm = c_mm * m.alpha_m * m.alpha_m;
    KappaBreakdown {
        ee,
        em,
        mm,
        total: ee + em + mm,
        scheme,
    }
}

/// `kappa = (4/pi) (23/16 a_E^2 + 26 a_E a_M + 64 a_M^2)`.
pub fn kappa_dimensionless<T: Scalar>(m: &DipoleMoments<T>) -> KappaBreakdown<T> {
    breakdown(m, Scheme::ThisPaper)
}

/// Same moments under the Feinberg-Sucher / Boyer coefficients.
pub fn feinberg_sucher_kappa<T: Scalar>(m: &DipoleMoments<T>) -> KappaBreakdown<T> {
    breakdown(m, Scheme::FeinbergSucherBoyer)
}

/// Energy coefficients `(c_EE, c_EM, c_MM)` from the three `S` values:
/// `1/2 (2 pi)^-6 (S_1/2, 4 S_2, 8 S_3)`.
pub fn kappa_from_s(s1: &PiRational, s2: &PiRational, s3: &PiRational) -> [PiRational; 3] {
    let base = &PiRational::rational(rat(1, 2)) * &PiRational::new(int(2), 1).pow(-6);
    [
        &(&base * s1) * &PiRational::rational(rat(1, 2)),
        &(&base * s2) * &PiRational::rational(int(4)),
        &(&base * s3) * &PiRational::rational(int(8)),
    ]
}

/// Retarded energy coefficient for two electric polarizabilities:
/// `-(23 / 4 pi) (1 / 2 pi)^2 (alpha/2)^2`.
pub fn casimir_polder_limit<T: Scalar>(alpha_e_at: T) -> T {
    let c = PiRational::new(rat(-23, 4), -1) * PiRational::new(rat(1, 4), -2);
    let half = alpha_e_at / T::lit(2.0);
    c.to_float::<T>() * half * half
}

/// Physical constants used to put units back on a curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitSystem<T> {
    pub alpha_fs: T,
    /// `m c^2` in `energy_unit`
    pub electron_mass_energy: T,
    /// in `length_unit`
    pub bohr_radius: T,
    /// reduced Compton wavelength, in `length_unit`
    pub compton_length: T,
    /// `lambda_c * Lambda`
    pub cutoff_ratio: T,
    pub energy_unit: String,
    pub length_unit: String,
}

const CODATA: &str = include_str!("../data/codata2018.txt");

impl<T: Scalar> UnitSystem<T> {
    /// Defaults from the bundled CODATA file.
    pub fn codata() -> Self {
        Self::from_key_values(CODATA).expect("bundled constants are valid")
    }

    /// Atomic units: energies in hartree, lengths in Bohr radii.
    pub fn hartree(alpha_fs: T) -> Result<Self> {
        let u = Self {
            alpha_fs,
            electron_mass_energy: (alpha_fs * alpha_fs).recip(),
            bohr_radius: T::one(),
            compton_length: alpha_fs,
            cutoff_ratio: T::one(),
            energy_unit: "hartree".into(),
            length_unit: "bohr".into(),
        };
        u.validate()?;
        Ok(u)
    }

    pub fn with_cutoff_ratio(mut self, cutoff_ratio: T) -> Result<Self> {
        self.cutoff_ratio = cutoff_ratio;
        self.validate()?;
        Ok(self)
    }

    /// Parses `key = value` lines (`#` comments). All numeric keys are
    /// required; unknown keys are rejected.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut get = std::collections::BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            get.insert(k.trim().to_string(), v.trim().to_string());
        }
        let num = |key: &str| -> Result<T> {
            let s = get
                .get(key)
                .ok_or_else(|| Error::Parse(format!("missing constant {key}")))?;
            let x: f64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("{key}: not a number: {s:?}")))?;
            Ok(T::lit(x))
        };
        let text_key = |key: &str| get.get(key).cloned().unwrap_or_default();
        let u = Self {
            alpha_fs: num("alpha_fs")?,
            electron_mass_energy: num("electron_mass_energy")?,
            bohr_radius: num("bohr_radius")?,
            compton_length: num("compton_length")?,
            cutoff_ratio: num("cutoff_ratio")?,
            energy_unit: text_key("energy_unit"),
            length_unit: text_key("length_unit"),
        };
        const KNOWN: [&str; 7] = [
            "alpha_fs",
            "electron_mass_energy",
            "bohr_radius",
            "compton_length",
            "cutoff_ratio",
            "energy_unit",
            "length_unit",
        ];
        if let Some(k) = get.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown constant {k}")));
        }
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.alpha_fs,
            self.electron_mass_energy,
            self.bohr_radius,
            self.compton_length,
            self.cutoff_ratio,
        ];
        if vals.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(Error::Domain("unit constants must be finite and positive".into()));
        }
        let implied = self.compton_length / self.alpha_fs;
        if ((implied - self.bohr_radius) / self.bohr_radius).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::Domain(format!(
                "bohr radius {} inconsistent with compton length / alpha = {}",
                self.bohr_radius, implied
            )));
        }
        Ok(())
    }

    /// `alpha m c^2` in the energy unit.
    pub fn energy_scale(&self) -> T {
        self.alpha_fs * self.electron_mass_energy
    }

    /// Cutoff `Lambda` in inverse Bohr radii.
    pub fn cutoff_inverse_bohr(&self) -> T {
        self.cutoff_ratio / self.alpha_fs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialCurve<T> {
    /// `R / r_B`
    pub r: Vec<T>,
    pub delta_e: Vec<T>,
    pub kappa: T,
}

/// `Delta E = -kappa alpha m c^2 (R/r_B)^-7` on a log grid in `R/r_B`.
pub fn potential_curve<T: Scalar>(
    r_min: T,
    r_max: T,
    n_points: usize,
    kappa: T,
    units: &UnitSystem<T>,
) -> Result<PotentialCurve<T>> {
    if !(r_min > T::zero()) || !(r_max > r_min) || !r_max.is_finite() {
        return Err(Error::Domain(format!("need 0 < R_min < R_max, got [{r_min}, {r_max}]")));
    }
    if n_points < 2 {
        return Err(Error::Domain("need at least two curve points".into()));
    }
    units.validate()?;
    let (la, lb) = (r_min.ln(), r_max.ln());
    let steps = T::from_usize_lossy(n_points - 1);
    let r: Vec<T> = (0..n_points)
        .map(|i| match i {
            0 => r_min,
            i if i == n_points - 1 => r_max,
            i => (la + (lb - la) * T::from_usize_lossy(i) / steps).exp(),
        })
        .collect();
    let scale = -kappa * units.energy_scale();
    let delta_e = r.iter().map(|&x| scale * x.powi(-7)).collect();
    Ok(PotentialCurve { r, delta_e, kappa })
}

impl<T: Scalar> PotentialCurve<T> {
    /// Log-log slope of `|Delta E|` between neighbouring points.
    pub fn loglog_slopes(&self) -> Vec<T> {
        self.r
            .windows(2)
            .zip(self.delta_e.windows(2))
            .map(|(r, e)| (e[1].abs().ln() - e[0].abs().ln()) / (r[1].ln() - r[0].ln()))
            .collect()
    }
}

#[derive(Serialize)]
pub struct CurveMetadata<'a> {
    #[serde(serialize_with = "sig17")]
    pub kappa: f64,
    pub scheme: Scheme,
    pub convention: Convention,
    pub units: &'a UnitSystem<f64>,
}

impl PotentialCurve<f64> {
    /// CSV `R_over_rB,delta_E` with a `#` header carrying the inputs.
    pub fn to_csv(&self, meta: &CurveMetadata<'_>) -> String {
        let mut out = format!(
            "# kappa={} scheme={} convention={} energy_unit={} alpha_fs={}\n",
            fmt_num(meta.kappa),
            meta.scheme,
            meta.convention,
            meta.units.energy_unit,
            fmt_num(meta.units.alpha_fs)
        );
        out.push_str("R_over_rB,delta_E\n");
        for (r, e) in self.r.iter().zip(&self.delta_e) {
            out.push_str(&format!("{},{}\n", fmt_num(*r), fmt_num(*e)));
        }
        out
    }
}

/// Kappa report entry: numbers plus the exact coefficient strings.
#[derive(Clone, Debug, Serialize)]
pub struct KappaReport {
    pub scheme: Scheme,
    pub convention: Convention,
    #[serde(serialize_with = "sig17")]
    pub alpha_e: f64,
    #[serde(serialize_with = "sig17")]
    pub alpha_m: f64,
    #[serde(serialize_with = "sig17")]
    pub ee: f64,
    #[serde(serialize_with = "sig17")]
    pub em: f64,
    #[serde(serialize_with = "sig17")]
    pub mm: f64,
    #[serde(serialize_with = "sig17")]
    pub total: f64,
    /// exact coefficients of `a_E^2`, `a_E a_M`, `a_M^2`
    pub coefficients: [String; 3],
}

impl KappaReport {
    pub fn new(m: &DipoleMoments<f64>, k: &KappaBreakdown<f64>) -> Self {
        Self {
            scheme: k.scheme,
            convention: m.convention,
            alpha_e: m.alpha_e,
            alpha_m: m.alpha_m,
            ee: k.ee,
            em: k.em,
            mm: k.mm,
            total: k.total,
            coefficients: kappa_coefficients(k.scheme).map(|c| c.to_string()),
        }
    }
}
