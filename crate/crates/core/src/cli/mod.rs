//! The `padyn` command line.
//!
//! Every subcommand reads the map from `--p --a --b --c --d` (or a flat
//! `key = value` file passed with `--config`, same keys; flags win) and
//! writes JSON lines by default or CSV with `--format csv`. The first line is
//! a header echoing the command and seed (a `#` comment line in CSV).
//!
//! Radii are printed as exponents `e` of `p^e`; `-inf` is radius zero.
//!
//! Exit codes: 0 success, 2 invalid input, 3 the orbit starts on the pole,
//! 4 verification mismatch.

mod commands;
mod config;

pub use config::{parse_exponent, render_exponent, ConfigError, Format, RunConfig};

use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_POLE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "padyn", version, about = "Exact p-adic dynamics of f(x) = (x² + ax + b)/(cx + d)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Case, fixed points or 2-cycle, multipliers and local radii.
    Classify,
    /// One record per orbit step with the radius to every anchor.
    Iterate,
    /// Check every orbit radius against the radius dynamics.
    Verify,
    /// Classify and verify every cell of a parameter grid (comma-separated values).
    Sweep,
    /// Sample spheres around an attracting or indifferent fixed point.
    Basin,
    /// Search the forward orbit of x0 for the pole.
    Probe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Iterate => "iterate",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Basin => "basin",
            Command::Probe => "probe",
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Flat `key = value` file with the same keys as the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Prime (comma-separated list for sweep).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub d: Option<String>,
    /// Starting point: a rational or `r + s*sqrt(D)`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Orbit length [default: 50].
    #[arg(long, global = true)]
    pub steps: Option<String>,
    /// exact | trunc | anchored [default: exact].
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// Significant p-adic digits for trunc and anchored [default: 40].
    #[arg(long, global = true)]
    pub precision: Option<String>,
    /// Sphere radius exponents for basin, e.g. `-1,-2,1`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub radii: Option<String>,
    /// Points per sphere for basin [default: 20].
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// Seed for sphere sampling [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// json | csv [default: json].
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Depth of the exceptional-set probe [default: 50].
    #[arg(long, global = true)]
    pub depth: Option<String>,
    /// Radius exponent beyond which an orbit counts as converged (`≤ -E`) or escaped (`≥ E`) [default: 60].
    #[arg(long = "threshold-exp", global = true)]
    pub threshold_exp: Option<String>,
    /// Exact iteration stops once a coordinate exceeds this many bits [default: 16384].
    #[arg(long = "size-ceiling", global = true)]
    pub size_ceiling: Option<String>,
    /// Test mode: corrupt the prediction at this step.
    #[arg(long = "corrupt-step", global = true, hide = true)]
    pub corrupt_step: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let all = [
            ("p", &self.p),
            ("a", &self.a),
            ("b", &self.b),
            ("c", &self.c),
            ("d", &self.d),
            ("x0", &self.x0),
            ("steps", &self.steps),
            ("backend", &self.backend),
            ("precision", &self.precision),
            ("radii", &self.radii),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("format", &self.format),
            ("depth", &self.depth),
            ("threshold-exp", &self.threshold_exp),
            ("size-ceiling", &self.size_ceiling),
            ("corrupt-step", &self.corrupt_step),
        ];
        all.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect()
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let file = match &cli.flags.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
                return EXIT_INVALID;
            }
        },
        None => None,
    };
    let cfg = match RunConfig::build(file.as_deref(), &cli.flags.pairs(), cli.command == Command::Sweep) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    match commands::dispatch(cli.command, &cfg, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}
