//! Run configuration: defaults, then a `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use casimir_core::atom::RadialGrid;
use casimir_core::dispersion::Convention;
use casimir_core::operator_lab::MAX_STATES;

pub const CONFIG_ENV: &str = "CASIMIR_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Units {
    Hartree,
    Si,
}

impl Units {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hartree" | "atomic" => Some(Self::Hartree),
            "si" | "SI" => Some(Self::Si),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

/// Bad configuration; reported as a usage error.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub grid_points: usize,
    pub grid_r_max: f64,
    /// inner wall of the log grid used for smeared potentials
    pub grid_r_min: f64,
    /// `None`: the bundled CODATA value
    pub alpha_fs: Option<f64>,
    /// `lambda_c Lambda`; `None` is the point Coulomb potential
    pub lambda: Option<f64>,
    pub convention: Convention,
    pub units: Units,
    pub curve_r_min: f64,
    pub curve_r_max: f64,
    pub curve_points: usize,
    pub operator_cutoff: usize,
    pub operator_dimension: usize,
    pub out_dir: PathBuf,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            t_min: 1e-2,
            t_max: 1e2,
            t_points: 40,
            grid_points: 20_000,
            grid_r_max: 40.0,
            grid_r_min: 1e-10,
            alpha_fs: None,
            lambda: None,
            convention: Convention::PaperFactor2,
            units: Units::Hartree,
            curve_r_min: 1e3,
            curve_r_max: 1e5,
            curve_points: 81,
            operator_cutoff: 32,
            operator_dimension: 2,
            out_dir: PathBuf::from("."),
            format: None,
        }
    }
}

pub const KEYS: [&str; 19] = [
    "rel_tol",
    "abs_tol",
    "t_min",
    "t_max",
    "t_points",
    "grid_points",
    "grid_r_max",
    "grid_r_min",
    "alpha_fs",
    "lambda",
    "convention",
    "units",
    "curve_r_min",
    "curve_r_max",
    "curve_points",
    "operator_cutoff",
    "operator_dimension",
    "out_dir",
    "format",
];

fn num(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| ConfigError(format!("{key}: not a number: {v:?}")))
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>()
        .map_err(|_| ConfigError(format!("{key}: not a non-negative integer: {v:?}")))
}

impl RunConfig {
    /// Loads `path`, or the file named by `$CASIMIR_CONFIG` when no path is
    /// given (clap resolves the environment variable).
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ConfigError(format!("cannot read config {}: {e}", p.display())))?;
            cfg.apply_text(&text)?;
        }
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "rel_tol" => self.rel_tol = num(key, v)?,
            "abs_tol" => self.abs_tol = num(key, v)?,
            "t_min" => self.t_min = num(key, v)?,
            "t_max" => self.t_max = num(key, v)?,
            "t_points" => self.t_points = count(key, v)?,
            "grid_points" => self.grid_points = count(key, v)?,
            "grid_r_max" => self.grid_r_max = num(key, v)?,
            "grid_r_min" => self.grid_r_min = num(key, v)?,
            "alpha_fs" => self.alpha_fs = Some(num(key, v)?),
            "lambda" => {
                let x = num(key, v)?;
                self.lambda = if x == f64::INFINITY { None } else { Some(x) };
            }
            "convention" => {
                self.convention = Convention::parse(v)
                    .ok_or_else(|| ConfigError(format!("convention: expected paper-factor-2 or no-factor-2, got {v:?}")))?
            }
            "units" => {
                self.units =
                    Units::parse(v).ok_or_else(|| ConfigError(format!("units: expected hartree or si, got {v:?}")))?
            }
            "curve_r_min" => self.curve_r_min = num(key, v)?,
            "curve_r_max" => self.curve_r_max = num(key, v)?,
            "curve_points" => self.curve_points = count(key, v)?,
            "operator_cutoff" => self.operator_cutoff = count(key, v)?,
            "operator_dimension" => self.operator_dimension = count(key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "format" => {
                self.format =
                    Some(Format::parse(v).ok_or_else(|| ConfigError(format!("format: expected csv or json, got {v:?}")))?)
            }
            _ => return Err(ConfigError(format!("unknown config key {key:?} (known: {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Everything checked here is checked before any computation starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(ConfigError(format!("{name} must be finite and > 0, got {x}")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("t_min", self.t_min)?;
        positive("t_max", self.t_max)?;
        if self.t_min >= self.t_max || self.t_points < 2 {
            return Err(ConfigError("need t_min < t_max and t_points >= 2".into()));
        }
        RadialGrid::uniform(self.grid_r_max, self.grid_points).map_err(|e| ConfigError(e.to_string()))?;
        RadialGrid::log(self.grid_r_min, self.grid_r_max, self.grid_points).map_err(|e| ConfigError(e.to_string()))?;
        if let Some(a) = self.alpha_fs {
            if !(a > 0.0 && a < 1.0) {
                return Err(ConfigError(format!("alpha_fs must lie in (0, 1), got {a}")));
            }
        }
        if let Some(l) = self.lambda {
            positive("lambda", l)?;
        }
        positive("curve_r_min", self.curve_r_min)?;
        positive("curve_r_max", self.curve_r_max)?;
        if self.curve_r_min >= self.curve_r_max || self.curve_points < 2 {
            return Err(ConfigError("need curve_r_min < curve_r_max and curve_points >= 2".into()));
        }
        if !(2..=3).contains(&self.operator_dimension) {
            return Err(ConfigError(format!("operator_dimension must be 2 or 3, got {}", self.operator_dimension)));
        }
        let states = (self.operator_cutoff as u128).pow(self.operator_dimension as u32);
        if self.operator_cutoff < 8 || states > MAX_STATES as u128 {
            return Err(ConfigError(format!(
                "operator_cutoff must be >= 8 with cutoff^dimension <= {MAX_STATES}, got {}",
                self.operator_cutoff
            )));
        }
        Ok(())
    }
}
