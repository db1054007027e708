//! Command-line definitions and config-file merging.
//!
//! A config file is TOML with an optional top-level `threads` key and one
//! table per subcommand whose keys are the long flag names:
//!
//! ```toml
//! threads = 4
//!
//! [solve]
//! bc = "robin"
//! alpha = 0.5
//! sigma = "sin2"
//! ```
//!
//! File values are spliced into the argument list ahead of the command-line
//! flags, so clap validates both the same way, unknown keys are rejected and
//! flags given on the command line win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spdelab_core::BoundaryCondition;

use crate::error::{LabError, Result};

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "spdelab", version, about = "Numerical laboratory for the stochastic heat equation on an interval")]
#[command(args_override_self = true)]
pub struct Cli {
    /// TOML file with defaults for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; falls back to SPDE_LAB_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Eigenvalues and normalizations.
    Eigen(EigenArgs),
    /// Heat kernel on a grid.
    Kernel(KernelArgs),
    /// Fitted constant of the two-regime kernel bound.
    KernelBoundFit(KernelBoundFitArgs),
    /// Covariance oracle on point pairs from a CSV.
    Cov(CovArgs),
    /// Exact samples of the additive-noise solution.
    SampleW(SampleWArgs),
    /// Conditional-variance scan.
    SlndScan(SlndScanArgs),
    /// Coupled nonlinear/linear solver.
    Solve(SolveArgs),
    /// Open KPZ through Hopf-Cole.
    Kpz(KpzArgs),
    /// Local or uniform modulus statistics.
    Modulus(ModulusArgs),
    /// Small-ball probabilities.
    Smallball(SmallBallArgs),
    /// Chung-type statistics.
    Chung(ChungArgs),
    /// Exceptional-point scan.
    Scan(ScanArgs),
    /// Moment growth at a point.
    Moments(MomentsArgs),
    /// Acceptance suite.
    Acceptance(AcceptanceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eigen(_) => "eigen",
            Command::Kernel(_) => "kernel",
            Command::KernelBoundFit(_) => "kernel-bound-fit",
            Command::Cov(_) => "cov",
            Command::SampleW(_) => "sample-w",
            Command::SlndScan(_) => "slnd-scan",
            Command::Solve(_) => "solve",
            Command::Kpz(_) => "kpz",
            Command::Modulus(_) => "modulus",
            Command::Smallball(_) => "smallball",
            Command::Chung(_) => "chung",
            Command::Scan(_) => "scan",
            Command::Moments(_) => "moments",
            Command::Acceptance(_) => "acceptance",
        }
    }

    pub fn out(&self) -> &Path {
        match self {
            Command::Eigen(a) => &a.out,
            Command::Kernel(a) => &a.out,
            Command::KernelBoundFit(a) => &a.out,
            Command::Cov(a) => &a.out,
            Command::SampleW(a) => &a.out,
            Command::SlndScan(a) => &a.out,
            Command::Solve(a) => &a.out,
            Command::Kpz(a) => &a.out,
            Command::Modulus(a) => &a.field.out,
            Command::Smallball(a) => &a.field.out,
            Command::Chung(a) => &a.field.out,
            Command::Scan(a) => &a.field.out,
            Command::Moments(a) => &a.out,
            Command::Acceptance(a) => &a.out,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::SampleW(a) => Some(a.seed),
            Command::SlndScan(a) => Some(a.seed),
            Command::Solve(a) => Some(a.seed),
            Command::Kpz(a) => Some(a.seed),
            Command::Modulus(a) => Some(a.field.seed),
            Command::Smallball(a) => Some(a.field.seed),
            Command::Chung(a) => Some(a.field.seed),
            Command::Scan(a) => Some(a.field.seed),
            Command::Moments(a) => Some(a.seed),
            Command::Acceptance(a) => Some(a.seed),
            _ => None,
        }
    }
}

pub const SUBCOMMANDS: [&str; 14] = [
    "eigen",
    "kernel",
    "kernel-bound-fit",
    "cov",
    "sample-w",
    "slnd-scan",
    "solve",
    "kpz",
    "modulus",
    "smallball",
    "chung",
    "scan",
    "moments",
    "acceptance",
];

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Robin,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BcArgs {
    #[arg(long, value_enum, default_value_t = BcKind::Dirichlet)]
    pub bc: BcKind,
    /// Robin coefficient at x = 0 in `u' + alpha u = 0`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Robin coefficient at x = L in `u' + beta u = 0`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
}

impl BcArgs {
    pub fn condition(&self) -> BoundaryCondition {
        match self.bc {
            BcKind::Dirichlet => BoundaryCondition::dirichlet(self.length),
            BcKind::Neumann => BoundaryCondition::neumann(self.length),
            BcKind::Robin => BoundaryCondition::robin(self.alpha, self.beta, self.length),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    Truncated,
    Asymptotic,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EigenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    #[arg(long, default_value_t = 16)]
    pub modes: usize,
    #[arg(long, default_value = "spdelab-out/eigen")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KernelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    #[arg(long, default_value_t = 0.01)]
    pub t: f64,
    /// Points per side of the (x, y) grid.
    #[arg(long, default_value_t = 33)]
    pub grid_size: usize,
    #[arg(long, default_value_t = 256)]
    pub modes: usize,
    /// Tolerance for the truncated tail of the kernel series.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long, default_value = "spdelab-out/kernel")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KernelBoundFitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    /// Times as `a:b:n` (geometric) or a comma list.
    #[arg(long, default_value = "0.001:1:13")]
    pub times: String,
    #[arg(long, default_value_t = 41)]
    pub grid_size: usize,
    #[arg(long, default_value_t = 512)]
    pub modes: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long, default_value = "spdelab-out/kernel-bound-fit")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    #[arg(long, default_value_t = 256)]
    pub modes: usize,
    #[arg(long, value_enum, default_value_t = Tail::Truncated)]
    pub tail: Tail,
    /// CSV with header and columns t1, x1, t2, x2.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, default_value = "spdelab-out/cov")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleWArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    #[arg(long, default_value_t = 128)]
    pub modes: usize,
    /// Times as `a:b:n` (uniform) or a comma list.
    #[arg(long, default_value = "0.1:1:10")]
    pub t_grid: String,
    #[arg(long, default_value = "0.1:0.9:9")]
    pub x_grid: String,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write every path to `paths.spdepath`.
    #[arg(long)]
    pub dump: bool,
    #[arg(long, default_value = "spdelab-out/sample-w")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SlndScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    #[arg(long, default_value_t = 128)]
    pub modes: usize,
    #[arg(long, value_enum, default_value_t = Tail::Asymptotic)]
    pub tail: Tail,
    /// Region `a,T,c,d` for `[a, T] x [c, d]`.
    #[arg(long, default_value = "0.1,1,0.2,0.8")]
    pub interior: String,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 20)]
    pub max_m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Draw targets up to the boundary (exploratory).
    #[arg(long)]
    pub include_boundary: bool,
    /// Allow boundary targets under Robin conditions.
    #[arg(long)]
    pub no_strict_interior: bool,
    #[arg(long, default_value = "spdelab-out/slnd-scan")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SchemeArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0 / 128.0)]
    pub dx: f64,
    #[arg(long, default_value_t = 64)]
    pub modes: usize,
    #[arg(long, default_value_t = 0.5)]
    pub horizon: f64,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Record every k-th step (the terminal step is always recorded).
    #[arg(long, default_value_t = 0)]
    pub every: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    /// zero | cos | const:c | table:FILE
    #[arg(long, default_value = "zero")]
    pub b: String,
    /// one | affine | sin2 | const:c | table:FILE
    #[arg(long, default_value = "one")]
    pub sigma: String,
    /// zero | const:c | bump | table:FILE
    #[arg(long, default_value = "zero")]
    pub u0: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write u and w paths to archives.
    #[arg(long)]
    pub dump: bool,
    #[arg(long, default_value = "spdelab-out/solve")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KpzArgs {
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub nu: f64,
    /// const:c | table:FILE (strictly positive)
    #[arg(long, default_value = "const:1")]
    pub u0: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub dump: bool,
    #[arg(long, default_value = "spdelab-out/kpz")]
    pub out: PathBuf,
}

/// Where the statistics commands get their paths: an archive, or exact
/// samples of `w` on a local grid around the center.
#[derive(Args, Debug, Clone, Serialize)]
pub struct FieldArgs {
    /// Path archive written by `sample-w --dump` or `solve --dump`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    #[arg(long, default_value_t = 64)]
    pub modes: usize,
    /// Center `t,x`.
    #[arg(long, default_value = "0.25,0.5")]
    pub center: String,
    /// Simulation grid steps.
    #[arg(long, default_value_t = 2.5e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0 / 128.0)]
    pub dx: f64,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "spdelab-out/stat")]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulusKind {
    Local,
    Uniform,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModulusArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long, value_enum, default_value_t = ModulusKind::Local)]
    pub kind: ModulusKind,
    /// Comma list of strictly decreasing radii.
    #[arg(long, default_value = "0.3,0.2,0.15")]
    pub ladder: String,
    /// Rectangle `a,T,c,d` for the uniform modulus; defaults to the grid.
    #[arg(long)]
    pub rect: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SmallBallArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Ball radius.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Comma list of ratios r / eps.
    #[arg(long, default_value = "0.3,0.35,0.4,0.45,0.5,0.55,0.6")]
    pub ratios: String,
    /// Grid cells per unit of r in parabolic units.
    #[arg(long, default_value_t = 4.0)]
    pub resolution: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChungArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value = "0.3,0.2,0.15")]
    pub ladder: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    /// Comma list of thresholds.
    #[arg(long, default_value = "0,0.5,1,1.5,2,2.5,3")]
    pub thetas: String,
    #[arg(long)]
    pub rect: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bc: BcArgs,
    #[arg(long, default_value = "cos")]
    pub b: String,
    #[arg(long, default_value = "sin2")]
    pub sigma: String,
    #[arg(long, default_value = "zero")]
    pub u0: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    /// Observation point `t,x`; t must be on the step grid.
    #[arg(long, default_value = "0.25,0.5")]
    pub point: String,
    #[arg(long, default_value = "2,4,6,8")]
    pub k: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "spdelab-out/moments")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AcceptanceArgs {
    /// Reduced sizes; checks plumbing and determinism, not tolerances.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Comma list of criterion numbers to run (default: all).
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, default_value = "spdelab-out/acceptance")]
    pub out: PathBuf,
}

/// Parses `argv`, merging in the `--config` file when one is given.
pub fn parse(argv: Vec<String>) -> std::result::Result<Cli, ParseFailure> {
    let first = Cli::try_parse_from(&argv).map_err(ParseFailure::Clap)?;
    let Some(config) = &first.config else {
        return Ok(first);
    };
    let text = std::fs::read_to_string(config)
        .map_err(|e| ParseFailure::Config(LabError::Config(format!("{}: {e}", config.display()))))?;
    let merged = splice_config(&argv, &text, first.command.name()).map_err(ParseFailure::Config)?;
    Cli::try_parse_from(merged).map_err(ParseFailure::Clap)
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Config(LabError),
}

/// Inserts the file's top-level keys after the program name and the
/// subcommand's table right after the subcommand token.
pub fn splice_config(argv: &[String], text: &str, command: &str) -> Result<Vec<String>> {
    let table: toml::Table = text.parse().map_err(|e| LabError::Config(format!("config file: {e}")))?;
    let mut globals = Vec::new();
    let mut section = Vec::new();
    for (key, value) in &table {
        match value {
            toml::Value::Table(t) => {
                if !SUBCOMMANDS.contains(&key.as_str()) {
                    return Err(LabError::Config(format!("config file: unknown section [{key}]")));
                }
                if key == command {
                    for (k, v) in t {
                        push_flag(&mut section, k, v)?;
                    }
                }
            }
            v if key == "threads" => push_flag(&mut globals, key, v)?,
            _ => return Err(LabError::Config(format!("config file: unknown top-level key `{key}`"))),
        }
    }
    let at = subcommand_position(argv)
        .ok_or_else(|| LabError::Config("no subcommand on the command line".into()))?;
    let mut out = vec![argv[0].clone()];
    out.extend(globals);
    out.extend_from_slice(&argv[1..=at]);
    out.extend(section);
    out.extend_from_slice(&argv[at + 1..]);
    Ok(out)
}

fn push_flag(out: &mut Vec<String>, key: &str, v: &toml::Value) -> Result<()> {
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &toml::Value| -> Result<String> {
        match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(f) => Ok(f.to_string()),
            other => Err(LabError::Config(format!("config key `{key}`: unsupported value {other}"))),
        }
    };
    match v {
        toml::Value::Boolean(true) => out.push(flag),
        toml::Value::Boolean(false) => {}
        toml::Value::Array(items) => {
            let parts = items.iter().map(scalar).collect::<Result<Vec<_>>>()?;
            out.push(flag);
            out.push(parts.join(","));
        }
        other => {
            out.push(flag);
            out.push(scalar(other)?);
        }
    }
    Ok(())
}

fn subcommand_position(argv: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let a = argv[i].as_str();
        if a == "--config" || a == "--threads" {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&a) {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// TOML echo of the effective subcommand settings, loadable with `--config`.
/// The thread count is left out: it never changes results.
pub fn config_echo(cli: &Cli) -> String {
    let value = serde_json::to_value(&cli.command).expect("arguments serialize");
    let mut root = toml::Table::new();
    if let serde_json::Value::Object(outer) = value {
        for (name, inner) in outer {
            if let Some(t) = json_to_toml(&inner) {
                root.insert(name, t);
            }
        }
    }
    toml::to_string(&root).expect("tables serialize")
}

fn json_to_toml(v: &serde_json::Value) -> Option<toml::Value> {
    use serde_json::Value as J;
    Some(match v {
        J::Null => return None,
        J::Bool(b) => toml::Value::Boolean(*b),
        J::Number(n) => match n.as_i64() {
            Some(i) => toml::Value::Integer(i),
            None => toml::Value::Float(n.as_f64()?),
        },
        J::String(s) => toml::Value::String(s.clone()),
        J::Array(a) => toml::Value::Array(a.iter().filter_map(json_to_toml).collect()),
        J::Object(o) => {
            let mut t = toml::Table::new();
            for (k, v) in o {
                if let Some(v) = json_to_toml(v) {
                    t.insert(k.clone(), v);
                }
            }
            toml::Value::Table(t)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn file_values_apply_and_flags_win() {
        let text = "threads = 3\n[eigen]\nbc = \"neumann\"\nmodes = 7\n";
        let merged = splice_config(&argv("spdelab --config c.toml eigen --modes 9"), text, "eigen").unwrap();
        let cli = Cli::try_parse_from(merged).unwrap();
        assert_eq!(cli.threads, Some(3));
        let Command::Eigen(a) = cli.command else { panic!() };
        assert_eq!(a.bc.bc, BcKind::Neumann);
        assert_eq!(a.modes, 9);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "[eigen]\nmodez = 7\n";
        let merged = splice_config(&argv("spdelab eigen"), text, "eigen").unwrap();
        assert!(Cli::try_parse_from(merged).is_err());
        assert!(splice_config(&argv("spdelab eigen"), "[nope]\na = 1\n", "eigen").is_err());
        assert!(splice_config(&argv("spdelab eigen"), "seed = 1\n", "eigen").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cli = Cli::try_parse_from(argv("spdelab solve --bc robin --alpha -0.5 --sigma sin2 --dt 0.0005")).unwrap();
        let echo = config_echo(&cli);
        let merged = splice_config(&argv("spdelab solve"), &echo, "solve").unwrap();
        let again = Cli::try_parse_from(merged).unwrap();
        assert_eq!(config_echo(&again), echo);
    }
}
