//! `casimir`: reproduction runs for the retarded dispersion coefficient.
//!
//! Exit codes: 0 success, 2 a reported acceptance check failed, 64 bad
//! flags or configuration, 1 numeric failure (diagnostic JSON on stderr).

mod commands;
mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use casimir_core::exact::PolynomialFamily;
use clap::{Args, Parser, Subcommand};

use commands::{Failure, KappaSource, MomentSource, ReduceInput};
use config::{ConfigError, Format, RunConfig};
use emit::{kind_of, Diagnostic};

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NUMERIC: u8 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "casimir",
    version,
    about = "Retarded van der Waals coefficient: reduction, S-values, kappa, R^-7 curves, operator checks",
    after_help = "Configuration: a flat `key = value` file given by --config or $CASIMIR_CONFIG.\n\
                  Flags override file values. Keys: rel_tol abs_tol t_min t_max t_points grid_points\n\
                  grid_r_max grid_r_min alpha_fs lambda convention units curve_r_min curve_r_max\n\
                  curve_points operator_cutoff operator_dimension out_dir format"
)]
struct Cli {
    /// Config file (key = value lines, `#` comments)
    #[arg(long, global = true, env = config::CONFIG_ENV, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct TolArgs {
    /// Sets both the relative and absolute quadrature tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct AtomArgs {
    /// Fine-structure constant (default: bundled CODATA 2018)
    #[arg(long)]
    alpha_fs: Option<f64>,
    /// Nuclear cutoff lambda_c * Lambda; omitted means a point nucleus
    #[arg(long)]
    lambda: Option<f64>,
    /// Interior radial grid points
    #[arg(long)]
    grid_points: Option<usize>,
    /// Outer radius of the radial grid, in Bohr radii
    #[arg(long)]
    grid_r_max: Option<f64>,
    /// paper-factor-2 or no-factor-2
    #[arg(long)]
    convention: Option<String>,
}

#[derive(Args, Debug, Default)]
struct OutArgs {
    /// Output file (written atomically); stdout when omitted
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the kernels K0..K4 on a log-spaced t grid.
    ///
    /// Output: CSV `t,K0,K1,K2,K3,K4` with `#` comment lines.
    Kernels {
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        t_points: Option<usize>,
        /// Output file (written atomically); stdout when omitted
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Moment-pair table of F1, F2, F3 or of a polynomial in u.
    ///
    /// Output: JSON `{input, table: {entries: [{a, b, num, den}]}}` (default)
    /// or CSV `a,b,coefficient` with exact rationals.
    Reduce {
        /// F1, F2 or F3
        #[arg(long, conflicts_with = "coefficients", required_unless_present = "coefficients")]
        family: Option<String>,
        /// Comma-separated coefficients of u^0, u^1, ... (e.g. "1,0,-3/2")
        #[arg(long, allow_hyphen_values = true)]
        coefficients: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compute S1..S3 and compare with 92, 208, 256 pi^3.
    ///
    /// Prints one line per integral; exit 2 when a relative deviation exceeds
    /// 1e-6. With --output, writes a JSON (default) or CSV report.
    Sj {
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Kappa for both schemes and both alpha_E conventions.
    ///
    /// Prints a table. With --output, writes JSON (default) or CSV.
    Kappa {
        #[arg(long, requires = "alpha_m", conflicts_with = "hydrogen")]
        alpha_e: Option<f64>,
        #[arg(long, requires = "alpha_e", allow_hyphen_values = true)]
        alpha_m: Option<f64>,
        /// Take the moments from the hydrogen ground-state solver
        #[arg(long, required_unless_present = "alpha_e")]
        hydrogen: bool,
        #[command(flatten)]
        atom: AtomArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Potential curve Delta E(R) = -kappa alpha m c^2 (R/r_B)^-7.
    ///
    /// Output: CSV `R_over_rB,delta_E` with a `#` header carrying kappa,
    /// scheme, convention and units (default), or JSON.
    Potential {
        #[arg(long, conflicts_with = "hydrogen")]
        kappa: Option<f64>,
        /// Kappa from the hydrogen moments (`this-paper` scheme)
        #[arg(long, required_unless_present = "kappa")]
        hydrogen: bool,
        /// hartree or si
        #[arg(long)]
        units: Option<String>,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        atom: AtomArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ground-state operator identities on the truncated oscillator.
    ///
    /// Prints a pass/fail table; exit 2 when a stated identity fails. With
    /// --output, writes the JSON report.
    ValidateOperators {
        /// Levels per axis
        #[arg(long)]
        cutoff: Option<usize>,
        /// 2 or 3
        #[arg(long)]
        dimension: Option<usize>,
        /// Output file (written atomically)
        #[arg(short, long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Full reproduction run into --out-dir.
    ///
    /// Writes kernels.csv, reduce_F1.json, reduce_F2.json, reduce_F3.json,
    /// sj.json, kappa_hydrogen.json, potential_hartree.csv, potential_si.csv
    /// (unless alpha_fs is overridden) and operators.json. Re-runs with the
    /// same configuration produce identical files. Exit 2 when the S-values
    /// or the operator identities fail.
    All {
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
}

fn set<T: ToString>(cfg: &mut RunConfig, key: &str, v: Option<T>) -> Result<(), ConfigError> {
    match v {
        Some(v) => cfg.set(key, &v.to_string()),
        None => Ok(()),
    }
}

impl TolArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        set(cfg, "rel_tol", self.tol)?;
        set(cfg, "abs_tol", self.tol)?;
        set(cfg, "rel_tol", self.rel_tol)?;
        set(cfg, "abs_tol", self.abs_tol)
    }
}

impl AtomArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        set(cfg, "alpha_fs", self.alpha_fs)?;
        set(cfg, "lambda", self.lambda)?;
        set(cfg, "grid_points", self.grid_points)?;
        set(cfg, "grid_r_max", self.grid_r_max)?;
        set(cfg, "convention", self.convention.as_ref())
    }
}

impl OutArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        set(cfg, "format", self.format.as_ref())
    }
}

fn fail_usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n\nRun `casimir --help` for usage.");
    ExitCode::from(EXIT_USAGE)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Kernels { .. } => "kernels",
        Command::Reduce { .. } => "reduce",
        Command::Sj { .. } => "sj",
        Command::Kappa { .. } => "kappa",
        Command::Potential { .. } => "potential",
        Command::ValidateOperators { .. } => "validate-operators",
        Command::All { .. } => "all",
    }
}

fn configure(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Kernels {
            t_min, t_max, t_points, ..
        } => {
            set(&mut cfg, "t_min", *t_min)?;
            set(&mut cfg, "t_max", *t_max)?;
            set(&mut cfg, "t_points", *t_points)?;
        }
        Command::Reduce { out, .. } => out.apply(&mut cfg)?,
        Command::Sj { tol, out } => {
            tol.apply(&mut cfg)?;
            out.apply(&mut cfg)?;
        }
        Command::Kappa { atom, out, .. } => {
            atom.apply(&mut cfg)?;
            out.apply(&mut cfg)?;
        }
        Command::Potential {
            units,
            r_min,
            r_max,
            points,
            atom,
            out,
            ..
        } => {
            set(&mut cfg, "units", units.as_ref())?;
            set(&mut cfg, "curve_r_min", *r_min)?;
            set(&mut cfg, "curve_r_max", *r_max)?;
            set(&mut cfg, "curve_points", *points)?;
            atom.apply(&mut cfg)?;
            out.apply(&mut cfg)?;
        }
        Command::ValidateOperators { cutoff, dimension, .. } => {
            set(&mut cfg, "operator_cutoff", *cutoff)?;
            set(&mut cfg, "operator_dimension", *dimension)?;
        }
        Command::All { out_dir, tol } => {
            tol.apply(&mut cfg)?;
            if let Some(d) = out_dir {
                cfg.out_dir = d.clone();
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<bool, Failure> {
    match &cli.command {
        Command::Kernels { output, .. } => commands::kernels(cfg, output.as_deref()),
        Command::Reduce {
            family,
            coefficients,
            out,
        } => {
            let input = match (family, coefficients) {
                (Some(f), _) => ReduceInput::Family(
                    PolynomialFamily::parse(f)
                        .ok_or_else(|| Failure::Usage(format!("unknown family {f:?}; expected F1, F2 or F3")))?,
                ),
                (None, Some(c)) => ReduceInput::parse_coefficients(c)?,
                (None, None) => return Err(Failure::Usage("give --family or --coefficients".into())),
            };
            commands::reduce(&input, cfg.format.unwrap_or(Format::Json), out.output.as_deref())
        }
        Command::Sj { out, .. } => commands::sj(cfg, out.output.as_deref()),
        Command::Kappa {
            alpha_e,
            alpha_m,
            out,
            ..
        } => {
            let source = match (alpha_e, alpha_m) {
                (Some(e), Some(m)) => MomentSource::Given {
                    alpha_e: *e,
                    alpha_m: *m,
                },
                _ => MomentSource::Hydrogen,
            };
            commands::kappa(cfg, &source, out.output.as_deref())
        }
        Command::Potential { kappa, out, .. } => {
            let source = match kappa {
                Some(k) if k.is_finite() => KappaSource::Given(*k),
                Some(k) => return Err(Failure::Usage(format!("kappa must be finite, got {k}"))),
                None => KappaSource::Hydrogen,
            };
            commands::potential(cfg, &source, out.output.as_deref())
        }
        Command::ValidateOperators { output, .. } => commands::validate_operators(cfg, output.as_deref()),
        Command::All { .. } => commands::all(cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match configure(&cli) {
        Ok(c) => c,
        Err(e) => return fail_usage(&e.0),
    };
    let name = command_name(&cli.command);
    match dispatch(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(Failure::Usage(msg)) => fail_usage(&msg),
        Err(Failure::Numeric(e)) => {
            eprintln!("{}", Diagnostic::new(name, kind_of(&e), e.to_string()).to_json());
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(Failure::Io(e)) => {
            eprintln!("{}", Diagnostic::new(name, "Io".into(), e.to_string()).to_json());
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use casimir_core::dispersion::Convention;
    use clap::CommandFactory;
    use config::Units;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.txt");
        std::fs::write(&p, "rel_tol = 1e-6\nabs_tol = 1e-6\n").unwrap();
        let cli = Cli::parse_from(["casimir", "--config", p.to_str().unwrap(), "sj", "--rel-tol", "1e-9"]);
        let cfg = configure(&cli).unwrap();
        assert_eq!(cfg.rel_tol, 1e-9);
        assert_eq!(cfg.abs_tol, 1e-6);
    }

    #[test]
    fn spellings_parse() {
        assert_eq!(Units::parse("si"), Some(Units::Si));
        assert_eq!(Convention::parse("no-factor-2"), Some(Convention::NoFactor2));
    }
}
