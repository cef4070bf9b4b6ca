//! Command-line front end. Parsing and output live here so the binary stays a
//! thin wrapper and the commands can be driven from tests.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 degenerate operator,
//! 3 verification failure.

mod format;
mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::determinants::{
    det_dirichlet_regularized, det_dirichlet_regularized_spec, det_periodic_regularized,
    determinant, reference_det, DetResult, PeriodicZeroModeReport, ZeroModeReport,
};
use crate::ermakov_bridge::det_pq;
use crate::green::kernel;
use crate::odesolve::{make_basis, BasisConvention};
use crate::profiles::{FrequencyProfile, Interval, ProfileConfig};
use crate::{BoundaryCondition, Error};

pub use format::{fmt_f64, to_json};
pub use verify::{verify_rows, Suite, VerifyRow};

#[derive(Debug, Parser)]
#[command(name = "fundet", version, about = "Functional determinants of -d^2/dt^2 - Omega^2(t)")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Profile as inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    pub profile: Option<String>,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t_a: f64,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t_b: f64,
    #[arg(long, global = true, default_value = "dirichlet")]
    pub bc: BoundaryCondition,
    /// Reference frequency for periodic and antiperiodic ratios.
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega0: f64,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Endpoint,
    Pq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Omega,
    #[value(name = "T")]
    T,
    Eps,
    Nu,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::Omega => "omega",
            SweepParam::T => "T",
            SweepParam::Eps => "eps",
            SweepParam::Nu => "nu",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Determinant and ratio as a JSON record.
    Det {
        /// Remove the zero mode instead of refusing a degenerate operator.
        #[arg(long)]
        regularized: bool,
        #[arg(long, value_enum, default_value = "endpoint")]
        method: Method,
        /// Lattice size of the oracle reported with periodic regularized values.
        #[arg(long, default_value_t = 1000)]
        lattice_n: usize,
    },
    /// Green function on an n×n grid as CSV (t, t_prime, value).
    Green {
        #[arg(long, default_value_t = 33)]
        n: usize,
    },
    /// Ratio over a parameter range as CSV.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Run a verification suite against closed forms and oracles.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

/// Resolved inputs shared by the commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileConfig,
    pub interval: Interval,
    pub bc: BoundaryCondition,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
}

fn default_omega0() -> f64 {
    1.0
}

impl RunConfig {
    pub fn from_args(args: &GlobalArgs) -> Result<Self, CliError> {
        let text = args
            .profile
            .as_deref()
            .ok_or_else(|| CliError::Usage("--profile is required for this command".into()))?;
        Ok(RunConfig {
            profile: parse_profile(text)?,
            interval: Interval::new(args.t_a, args.t_b).map_err(|e| CliError::Usage(e.to_string()))?,
            bc: args.bc,
            omega0: args.omega0,
        })
    }

    pub fn build_profile(&self) -> Result<FrequencyProfile, CliError> {
        self.profile.build(self.interval).map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// Inline JSON when the text starts with `{`, otherwise a file path.
pub fn parse_profile(text: &str) -> Result<ProfileConfig, CliError> {
    let json = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        fs::read_to_string(text)
            .map_err(|e| CliError::Usage(format!("cannot read profile file '{text}': {e}")))?
    };
    ProfileConfig::from_json(&json).map_err(|e| CliError::Usage(format!("invalid profile: {e}")))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Degenerate(Error),
    #[error(transparent)]
    Numerical(Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Degenerate(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable record for degenerate operators.
    pub fn to_json(&self) -> String {
        let kind = match self {
            CliError::Degenerate(e) | CliError::Numerical(e) => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) | CliError::Csv(_) => "io",
        };
        let record = serde_json::json!({ "error": { "kind": kind, "message": self.to_string() } });
        to_json(&record)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_degenerate_operator() {
            CliError::Degenerate(e)
        } else {
            CliError::Numerical(e)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Verification ran but some rows failed.
    Failed { failed: usize, total: usize },
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed { .. } => 3,
        }
    }
}

/// Runs a parsed command, writing data to `out` and a summary to `log`.
pub fn execute(cli: &Cli, out: &mut dyn Write, log: &mut dyn Write) -> Result<Status, CliError> {
    match &cli.command {
        Command::Det { regularized, method, lattice_n } => {
            let cfg = RunConfig::from_args(&cli.global)?;
            let record = cmd_det(&cfg, *regularized, *method, *lattice_n)?;
            writeln!(out, "{record}")?;
            if let Some(note) = regularized_warning(&record) {
                writeln!(log, "warning: {note}")?;
            }
            Ok(Status::Ok)
        }
        Command::Green { n } => {
            let cfg = RunConfig::from_args(&cli.global)?;
            cmd_green(&cfg, *n, out)?;
            Ok(Status::Ok)
        }
        Command::Sweep { param, from, to, steps } => {
            let cfg = RunConfig::from_args(&cli.global)?;
            cmd_sweep(&cfg, *param, *from, *to, *steps, out)?;
            Ok(Status::Ok)
        }
        Command::Verify { suite } => {
            let rows = verify_rows(*suite)?;
            verify::write_csv(&rows, out)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            writeln!(
                log,
                "verify {}: {}/{} checks passed",
                suite.name(),
                rows.len() - failed,
                rows.len()
            )?;
            for r in rows.iter().filter(|r| !r.pass) {
                writeln!(log, "  FAIL {} {} {}: rel_err {:.3e} > {:.1e}", r.check, r.profile, r.bc, r.rel_err, r.tolerance)?;
            }
            Ok(if failed == 0 { Status::Ok } else { Status::Failed { failed, total: rows.len() } })
        }
    }
}

/// Regularized twisted values are printed next to a lattice oracle; say so
/// when the two disagree or the oracle is unavailable.
fn regularized_warning(record: &str) -> Option<String> {
    let v: serde_json::Value = serde_json::from_str(record).ok()?;
    let zm = v.get("zero_mode")?;
    zm.get("formula")?;
    if let Some(e) = zm.get("oracle_error").and_then(|e| e.as_str()) {
        return Some(format!("no lattice cross-check for the regularized value ({e})"));
    }
    let d = zm.get("discrepancy")?.as_f64()?;
    (d > 1e-3).then(|| {
        format!("regularized formula disagrees with the lattice pseudo-determinant (relative discrepancy {d:.3e})")
    })
}

#[derive(Serialize)]
struct DetRecord<'a> {
    method: &'static str,
    #[serde(flatten)]
    result: &'a DetResult,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ZeroModeRecord {
    Dirichlet(ZeroModeReport),
    Twisted(PeriodicZeroModeReport),
}

#[derive(Serialize)]
struct RegularizedRecord {
    method: &'static str,
    bc: BoundaryCondition,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    zero_mode: ZeroModeRecord,
}

pub fn cmd_det(
    cfg: &RunConfig,
    regularized: bool,
    method: Method,
    lattice_n: usize,
) -> Result<String, CliError> {
    let profile = cfg.build_profile()?;
    let t_len = cfg.interval.length();
    if regularized {
        let record = match cfg.bc {
            BoundaryCondition::Dirichlet => {
                let report = match cfg.profile.zero_mode_spec(cfg.interval) {
                    Some(spec) => det_dirichlet_regularized_spec(&spec?)?,
                    None => det_dirichlet_regularized(&profile)?,
                };
                RegularizedRecord {
                    method: "regularized",
                    bc: cfg.bc,
                    value: report.det_regularized,
                    ratio: Some(report.det_regularized / t_len),
                    zero_mode: ZeroModeRecord::Dirichlet(report),
                }
            }
            bc => {
                let report = det_periodic_regularized(&profile, bc, cfg.omega0, lattice_n)?;
                RegularizedRecord {
                    method: "regularized",
                    bc,
                    value: report.formula,
                    ratio: reference_det(bc, t_len, cfg.omega0).ok().map(|r| report.formula / r),
                    zero_mode: ZeroModeRecord::Twisted(report),
                }
            }
        };
        return Ok(to_json(&record));
    }
    let (result, name) = match method {
        Method::Endpoint => (determinant(&profile, cfg.bc, cfg.omega0)?, "endpoint"),
        Method::Pq => (det_pq(&profile, cfg.bc, cfg.omega0)?, "pq"),
    };
    if result.degenerate {
        return Err(CliError::Degenerate(Error::ZeroMode(format!(
            "{} determinant {:e} vanishes to working accuracy; rerun with --regularized",
            cfg.bc, result.value
        ))));
    }
    Ok(to_json(&DetRecord { method: name, result: &result }))
}

pub fn cmd_green(cfg: &RunConfig, n: usize, out: &mut dyn Write) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
    }
    let profile = cfg.build_profile()?;
    let basis = make_basis(&profile, 1.0, BasisConvention::Canonical)?;
    let k = kernel(&basis, cfg.bc)?;
    let grid = cfg.interval.grid(n);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "t_prime", "value"])?;
    for &t in &grid {
        for &s in &grid {
            w.write_record([fmt_f64(t), fmt_f64(s), fmt_f64(k.evaluate(t, s))])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn swept(cfg: &RunConfig, param: SweepParam, x: f64) -> Result<RunConfig, CliError> {
    let mut c = cfg.clone();
    let unsupported = || {
        CliError::Usage(format!(
            "cannot sweep '{}' for profile {}",
            param.name(),
            cfg.profile.label()
        ))
    };
    match (param, &mut c.profile) {
        (SweepParam::T, _) => c.interval.t_b = c.interval.t_a + x,
        (SweepParam::Omega, ProfileConfig::Constant { omega })
        | (SweepParam::Omega, ProfileConfig::Modulated { omega, .. }) => *omega = x,
        (SweepParam::Eps, ProfileConfig::Modulated { eps, .. }) => *eps = x,
        (SweepParam::Nu, ProfileConfig::Modulated { nu, .. }) => *nu = x,
        _ => return Err(unsupported()),
    }
    Ok(c)
}

fn sweep_point(cfg: &RunConfig) -> crate::Result<DetResult> {
    let iv = Interval::new(cfg.interval.t_a, cfg.interval.t_b)?;
    determinant(&cfg.profile.build(iv)?, cfg.bc, cfg.omega0)
}

/// One row per parameter value; a failing point becomes a row with an error
/// message instead of aborting the sweep.
pub fn cmd_sweep(
    cfg: &RunConfig,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if steps == 0 || !(from <= to) || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Usage(format!(
            "empty sweep range: from {from} to {to} in {steps} steps"
        )));
    }
    let xs: Vec<f64> = (0..steps)
        .map(|k| {
            if steps == 1 {
                from
            } else {
                from + (to - from) * k as f64 / (steps - 1) as f64
            }
        })
        .collect();
    // validate the parameter against the profile before doing any work
    swept(cfg, param, from)?;
    let results: Vec<crate::Result<DetResult>> = std::thread::scope(|s| {
        let handles: Vec<_> = xs
            .iter()
            .map(|&x| {
                let c = swept(cfg, param, x).expect("validated above");
                s.spawn(move || sweep_point(&c))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["param", "value", "ratio", "error"])?;
    for (x, r) in xs.iter().zip(results) {
        match r {
            Ok(d) => w.write_record([fmt_f64(*x), fmt_f64(d.value), fmt_f64(d.ratio), String::new()])?,
            Err(e) => w.write_record([fmt_f64(*x), String::new(), String::new(), e.to_string()])?,
        }
    }
    w.flush()?;
    Ok(())
}
