use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use casimir_core::atom::{dalgarno_lewis, dipole_moments, moment_r2, solve_ground, RadialGrid};
use casimir_core::dispersion::{
    compute_s_detailed, feinberg_sucher_kappa, kappa_dimensionless, potential_curve, s_targets, Convention,
    CurveMetadata, DipoleMoments, KappaReport, Scheme, UnitSystem,
};
use casimir_core::exact::{reduce_to_moments, MomentPairTable, PolynomialFamily, Rational};
use casimir_core::kernels::{kernel_table_csv, log_grid};
use casimir_core::operator_lab::{bexp_scaling, build_oscillator, verify_identities, BexpReport, IdentityReport};
use casimir_core::output::{fmt_num, sig17, sig17_vec, to_json_pretty};
use casimir_core::quadrature::QuadratureSpec;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::{Format, RunConfig, Units};
use crate::emit::emit;

/// Acceptance threshold on `|S / target - 1|`.
pub const S_REL_THRESHOLD: f64 = 1e-6;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(casimir_core::Error),
    Io(io::Error),
}

impl From<casimir_core::Error> for Failure {
    fn from(e: casimir_core::Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// `true` when every acceptance check the command ran passed.
pub type Outcome = Result<bool, Failure>;

fn codata_alpha() -> f64 {
    UnitSystem::<f64>::codata().alpha_fs
}

// ---- kernels ---------------------------------------------------------------

pub fn kernels_csv(cfg: &RunConfig) -> Result<String, Failure> {
    let ts = log_grid(cfg.t_min, cfg.t_max, cfg.t_points);
    let mut out = format!(
        "# closed-form kernels on {} log-spaced t in [{}, {}]\n",
        cfg.t_points,
        fmt_num(cfg.t_min),
        fmt_num(cfg.t_max)
    );
    out.push_str(&kernel_table_csv(&ts)?);
    Ok(out)
}

pub fn kernels(cfg: &RunConfig, output: Option<&Path>) -> Outcome {
    emit(output, &kernels_csv(cfg)?)?;
    Ok(true)
}

// ---- reduce ----------------------------------------------------------------

pub enum ReduceInput {
    Family(PolynomialFamily),
    Coefficients(Vec<Rational>),
}

impl ReduceInput {
    pub fn parse_coefficients(list: &str) -> Result<Self, Failure> {
        let coeffs = list
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<Rational>()
                    .map_err(|_| Failure::Usage(format!("not a rational coefficient: {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::Coefficients(coeffs))
    }

    fn label(&self) -> String {
        match self {
            Self::Family(f) => f.name().to_string(),
            Self::Coefficients(c) => c.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(","),
        }
    }
}

#[derive(Serialize)]
struct ReduceDoc<'a> {
    input: &'a str,
    table: Box<RawValue>,
}

fn table_json(label: &str, table: &MomentPairTable) -> String {
    let raw = RawValue::from_string(table.to_json()).expect("table json is valid");
    to_json_pretty(&ReduceDoc { input: label, table: raw })
}

fn table_csv(label: &str, table: &MomentPairTable) -> String {
    let mut out = format!("# moment-pair table for {label}\na,b,coefficient\n");
    for ((a, b), q) in table.iter() {
        let _ = writeln!(out, "{a},{b},{q}");
    }
    out
}

pub fn reduce(input: &ReduceInput, format: Format, output: Option<&Path>) -> Outcome {
    let coeffs = match input {
        ReduceInput::Family(f) => f.coefficients(),
        ReduceInput::Coefficients(c) => c.clone(),
    };
    let table = reduce_to_moments(&coeffs)?;
    let label = input.label();
    let text = match format {
        Format::Json => table_json(&label, &table),
        Format::Csv => table_csv(&label, &table),
    };
    emit(output, &text)?;
    Ok(true)
}

// ---- sj --------------------------------------------------------------------

#[derive(Serialize)]
pub struct SEntry {
    pub family: &'static str,
    #[serde(serialize_with = "sig17")]
    pub value: f64,
    #[serde(serialize_with = "sig17")]
    pub over_pi3: f64,
    pub target_over_pi3: String,
    #[serde(serialize_with = "sig17")]
    pub rel_deviation: f64,
    #[serde(serialize_with = "sig17")]
    pub error_estimate: f64,
    pub evaluations: usize,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SReport {
    #[serde(serialize_with = "sig17")]
    pub rel_tol: f64,
    #[serde(serialize_with = "sig17")]
    pub abs_tol: f64,
    #[serde(serialize_with = "sig17")]
    pub threshold: f64,
    pub entries: Vec<SEntry>,
}

impl SReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}/pi^3 = {:.6} (target {})  value = {}  rel_dev = {:.2e}  [rel_tol = {:e}, abs_tol = {:e}, threshold = {:e}]  {}",
                e.family.replace('F', "S"),
                e.over_pi3,
                e.target_over_pi3,
                fmt_num(e.value),
                e.rel_deviation,
                self.rel_tol,
                self.abs_tol,
                self.threshold,
                if e.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = format!(
            "# rel_tol={} abs_tol={} threshold={}\nS,value,over_pi3,target_over_pi3,rel_deviation,error_estimate,pass\n",
            fmt_num(self.rel_tol),
            fmt_num(self.abs_tol),
            fmt_num(self.threshold)
        );
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.family.replace('F', "S"),
                fmt_num(e.value),
                fmt_num(e.over_pi3),
                e.target_over_pi3,
                fmt_num(e.rel_deviation),
                fmt_num(e.error_estimate),
                e.pass
            );
        }
        out
    }
}

pub fn s_report(cfg: &RunConfig) -> Result<SReport, Failure> {
    let spec = QuadratureSpec::new(cfg.rel_tol, cfg.abs_tol);
    let mut entries = Vec::new();
    for (fam, target) in PolynomialFamily::ALL.into_iter().zip(s_targets()) {
        let r = compute_s_detailed(&fam.table(), &spec)?;
        let want: f64 = target.to_float();
        let rel = ((r.value - want) / want).abs();
        entries.push(SEntry {
            family: fam.name(),
            value: r.value,
            over_pi3: r.value / PI.powi(3),
            target_over_pi3: target.coeff().to_string(),
            rel_deviation: rel,
            error_estimate: r.error_estimate,
            evaluations: r.evaluations,
            pass: rel <= S_REL_THRESHOLD,
        });
    }
    Ok(SReport {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        threshold: S_REL_THRESHOLD,
        entries,
    })
}

pub fn sj(cfg: &RunConfig, output: Option<&Path>) -> Outcome {
    let report = s_report(cfg)?;
    print!("{}", report.lines());
    if let Some(p) = output {
        let text = match cfg.format.unwrap_or(Format::Json) {
            Format::Json => to_json_pretty(&report),
            Format::Csv => report.csv(),
        };
        emit(Some(p), &text)?;
    }
    Ok(report.pass())
}

// ---- kappa -----------------------------------------------------------------

pub enum MomentSource {
    Given { alpha_e: f64, alpha_m: f64 },
    Hydrogen,
}

#[derive(Serialize)]
pub struct HydrogenInfo {
    pub grid: String,
    #[serde(serialize_with = "sig17")]
    pub r_max: f64,
    pub points: usize,
    /// `lambda_c Lambda`; null for the point nucleus
    pub lambda: Option<f64>,
    #[serde(serialize_with = "sig17")]
    pub alpha_fs: f64,
    #[serde(serialize_with = "sig17")]
    pub energy: f64,
    #[serde(serialize_with = "sig17")]
    pub r2: f64,
    #[serde(serialize_with = "sig17")]
    pub resolvent: f64,
}

impl HydrogenInfo {
    fn describe(&self) -> String {
        format!(
            "hydrogen on {} grid (r_max = {}, {} points), lambda_c Lambda = {}, alpha = {}: E = {:.10}, <r^2> = {:.8}, <z (H-E)^-1 z> = {:.8}",
            self.grid,
            self.r_max,
            self.points,
            self.lambda.map_or("inf".to_string(), |l| l.to_string()),
            self.alpha_fs,
            self.energy,
            self.r2,
            self.resolvent
        )
    }
}

pub struct Hydrogen {
    pub info: HydrogenInfo,
    pub moments: [DipoleMoments<f64>; 2],
}

impl Hydrogen {
    pub fn moments(&self, convention: Convention) -> DipoleMoments<f64> {
        *self
            .moments
            .iter()
            .find(|m| m.convention == convention)
            .expect("both conventions are computed")
    }
}

/// Point nucleus on the uniform grid; a smeared nucleus (finite lambda) on
/// the log grid, which resolves the `1/Lambda` scale.
pub fn hydrogen(cfg: &RunConfig) -> Result<Hydrogen, Failure> {
    let alpha = cfg.alpha_fs.unwrap_or_else(codata_alpha);
    let (grid, cutoff, kind) = match cfg.lambda {
        None => (RadialGrid::uniform(cfg.grid_r_max, cfg.grid_points)?, f64::INFINITY, "uniform".to_string()),
        Some(l) => (
            RadialGrid::log(cfg.grid_r_min, cfg.grid_r_max, cfg.grid_points)?,
            l / alpha,
            format!("log (r_min = {})", cfg.grid_r_min),
        ),
    };
    let sol = solve_ground(&grid, cutoff)?;
    let info = HydrogenInfo {
        grid: kind,
        r_max: cfg.grid_r_max,
        points: cfg.grid_points,
        lambda: cfg.lambda,
        alpha_fs: alpha,
        energy: sol.energy,
        r2: moment_r2(&sol),
        resolvent: dalgarno_lewis(&sol)?,
    };
    let moments = [
        dipole_moments(&sol, alpha, Convention::PaperFactor2)?,
        dipole_moments(&sol, alpha, Convention::NoFactor2)?,
    ];
    Ok(Hydrogen { info, moments })
}

#[derive(Serialize)]
pub struct KappaDoc {
    pub source: String,
    pub hydrogen: Option<HydrogenInfo>,
    pub rows: Vec<KappaReport>,
}

impl KappaDoc {
    pub fn table(&self) -> String {
        let mut out = format!("# {}\n", self.source);
        let _ = writeln!(
            out,
            "{:<24} {:<15} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14}",
            "scheme", "convention", "alpha_E", "alpha_M", "ee", "em", "mm", "total"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<24} {:<15} {:>14.8} {:>14.6e} {:>14.8} {:>14.6e} {:>14.6e} {:>14.8}",
                r.scheme.name(),
                r.convention.name(),
                r.alpha_e,
                r.alpha_m,
                r.ee,
                r.em,
                r.mm,
                r.total
            );
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = format!("# {}\nscheme,convention,alpha_e,alpha_m,ee,em,mm,total\n", self.source);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.scheme.name(),
                r.convention.name(),
                fmt_num(r.alpha_e),
                fmt_num(r.alpha_m),
                fmt_num(r.ee),
                fmt_num(r.em),
                fmt_num(r.mm),
                fmt_num(r.total)
            );
        }
        out
    }
}

pub fn kappa_doc(cfg: &RunConfig, source: &MomentSource) -> Result<KappaDoc, Failure> {
    let (hydrogen, label) = match source {
        MomentSource::Given { .. } => (
            None,
            "moments given explicitly; the convention column only labels them".to_string(),
        ),
        MomentSource::Hydrogen => {
            let h = hydrogen(cfg)?;
            let label = h.info.describe();
            (Some(h), label)
        }
    };
    let mut rows = Vec::new();
    for scheme in [Scheme::ThisPaper, Scheme::FeinbergSucherBoyer] {
        for convention in [Convention::PaperFactor2, Convention::NoFactor2] {
            let m = match (source, &hydrogen) {
                (MomentSource::Given { alpha_e, alpha_m }, _) => DipoleMoments::new(*alpha_e, *alpha_m, convention),
                (MomentSource::Hydrogen, Some(h)) => h.moments(convention),
                (MomentSource::Hydrogen, None) => unreachable!("hydrogen moments computed above"),
            };
            let k = match scheme {
                Scheme::ThisPaper => kappa_dimensionless(&m),
                Scheme::FeinbergSucherBoyer => feinberg_sucher_kappa(&m),
            };
            rows.push(KappaReport::new(&m, &k));
        }
    }
    Ok(KappaDoc {
        source: label,
        hydrogen: hydrogen.map(|h| h.info),
        rows,
    })
}

pub fn kappa(cfg: &RunConfig, source: &MomentSource, output: Option<&Path>) -> Outcome {
    let doc = kappa_doc(cfg, source)?;
    print!("{}", doc.table());
    if let Some(p) = output {
        let text = match cfg.format.unwrap_or(Format::Json) {
            Format::Json => to_json_pretty(&doc),
            Format::Csv => doc.csv(),
        };
        emit(Some(p), &text)?;
    }
    Ok(true)
}

// ---- potential -------------------------------------------------------------

pub enum KappaSource {
    Given(f64),
    Hydrogen,
}

fn units_for(cfg: &RunConfig, units: Units) -> Result<UnitSystem<f64>, Failure> {
    match units {
        Units::Hartree => Ok(UnitSystem::hartree(cfg.alpha_fs.unwrap_or_else(codata_alpha))?),
        Units::Si if cfg.alpha_fs.is_some() => Err(Failure::Usage(
            "alpha_fs can only be overridden with hartree units; SI curves use the bundled CODATA set".into(),
        )),
        Units::Si => Ok(UnitSystem::codata()),
    }
}

#[derive(Serialize)]
struct CurveDoc<'a> {
    #[serde(flatten)]
    meta: &'a CurveMetadata<'a>,
    #[serde(serialize_with = "sig17_vec")]
    r_over_rb: &'a [f64],
    #[serde(serialize_with = "sig17_vec")]
    delta_e: &'a [f64],
}

pub fn potential_text(cfg: &RunConfig, source: &KappaSource, units: Units, format: Format) -> Result<String, Failure> {
    let system = units_for(cfg, units)?;
    let kappa = match source {
        KappaSource::Given(k) => *k,
        KappaSource::Hydrogen => kappa_dimensionless(&hydrogen(cfg)?.moments(cfg.convention)).total,
    };
    let curve = potential_curve(cfg.curve_r_min, cfg.curve_r_max, cfg.curve_points, kappa, &system)?;
    let meta = CurveMetadata {
        kappa,
        scheme: Scheme::ThisPaper,
        convention: cfg.convention,
        units: &system,
    };
    Ok(match format {
        Format::Csv => curve.to_csv(&meta),
        Format::Json => to_json_pretty(&CurveDoc {
            meta: &meta,
            r_over_rb: &curve.r,
            delta_e: &curve.delta_e,
        }),
    })
}

pub fn potential(cfg: &RunConfig, source: &KappaSource, output: Option<&Path>) -> Outcome {
    let text = potential_text(cfg, source, cfg.units, cfg.format.unwrap_or(Format::Csv))?;
    emit(output, &text)?;
    Ok(true)
}

// ---- validate-operators ----------------------------------------------------

#[derive(Serialize)]
pub struct OperatorDoc {
    pub identities: IdentityReport,
    pub scaling: BexpReport,
    pub all_pass: bool,
}

impl OperatorDoc {
    pub fn table(&self) -> String {
        let mut out = self.identities.table();
        let s = &self.scaling;
        let _ = writeln!(
            out,
            "B- scaling (R = {:?}): fitted lead {:.6e}, stated lead {:.6e}, remainder exponent {:.3} (about fitted lead {:.3})",
            s.r, s.fitted_leading, s.expected_leading, s.remainder_exponent, s.remainder_exponent_fitted
        );
        for c in &s.checks {
            let _ = writeln!(
                out,
                "  {:<34} residual {:>10.3e}  tol {:>8.1e}  {}{}",
                c.name,
                c.residual,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" },
                if c.reference { "  (reference)" } else { "" }
            );
        }
        out
    }
}

fn pad(v: &[f64], d: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(d, 0.0);
    out
}

pub fn operator_doc(cfg: &RunConfig) -> Result<OperatorDoc, Failure> {
    let d = cfg.operator_dimension;
    let set = build_oscillator::<f64>(d, cfg.operator_cutoff)?;
    let (e1, e2) = (pad(&[0.0, 1.0], d), pad(&[1.0, 0.0], d));
    let identities = verify_identities(&set, &pad(&[0.1, 0.0], d), &pad(&[0.0, 0.1], d), &e1, &e2)?;
    let scaling = bexp_scaling(
        &set,
        &pad(&[0.2, 0.0], d),
        &pad(&[0.0, 0.2], d),
        &e1,
        &e2,
        &[2.0, 4.0, 8.0, 16.0],
    )?;
    let all_pass = identities.all_pass() && scaling.all_pass();
    Ok(OperatorDoc {
        identities,
        scaling,
        all_pass,
    })
}

pub fn validate_operators(cfg: &RunConfig, output: Option<&Path>) -> Outcome {
    let doc = operator_doc(cfg)?;
    print!("{}", doc.table());
    if let Some(p) = output {
        emit(Some(p), &to_json_pretty(&doc))?;
    }
    Ok(doc.all_pass)
}

// ---- all -------------------------------------------------------------------

pub fn all(cfg: &RunConfig) -> Outcome {
    let dir = &cfg.out_dir;
    let write = |name: &str, text: &str| -> Result<(), Failure> {
        let p = dir.join(name);
        emit(Some(&p), text)?;
        println!("wrote {}", p.display());
        Ok(())
    };

    write("kernels.csv", &kernels_csv(cfg)?)?;
    for fam in PolynomialFamily::ALL {
        let table = reduce_to_moments(&fam.coefficients())?;
        write(&format!("reduce_{}.json", fam.name()), &table_json(fam.name(), &table))?;
    }

    let s = s_report(cfg)?;
    print!("{}", s.lines());
    write("sj.json", &to_json_pretty(&s))?;

    let k = kappa_doc(cfg, &MomentSource::Hydrogen)?;
    print!("{}", k.table());
    write("kappa_hydrogen.json", &to_json_pretty(&k))?;

    write(
        "potential_hartree.csv",
        &potential_text(cfg, &KappaSource::Hydrogen, Units::Hartree, Format::Csv)?,
    )?;
    if cfg.alpha_fs.is_none() {
        write(
            "potential_si.csv",
            &potential_text(cfg, &KappaSource::Hydrogen, Units::Si, Format::Csv)?,
        )?;
    }

    let ops = operator_doc(cfg)?;
    print!("{}", ops.table());
    write("operators.json", &to_json_pretty(&ops))?;

    let pass = s.pass() && ops.all_pass;
    println!(
        "summary: S-values {}, operator identities {}",
        if s.pass() { "PASS" } else { "FAIL" },
        if ops.all_pass { "PASS" } else { "FAIL" }
    );
    Ok(pass)
}
