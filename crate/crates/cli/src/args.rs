use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "newton-ensemble", version, about = "Random polynomials with prescribed Newton polytope")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Omit the timestamp line so reruns are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "NEWTON_ENSEMBLE_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    /// `s_j = log|z_j|²`.
    #[default]
    S,
    /// `|z_j|`, converted to `s` before evaluation.
    Moduli,
}

#[derive(Debug, Args, Serialize)]
pub struct PolytopeArgs {
    /// JSON file `{"vertices": [[..], ..], "p": optional}`.
    #[arg(long)]
    pub polytope: PathBuf,
    /// Accept a non-Delzant polytope (only `info` is then available).
    #[arg(long)]
    pub allow_non_delzant: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ToleranceArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub residual_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub feasibility_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub transition_tol: Option<f64>,
    #[arg(long)]
    pub hessian_step: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Vertices, facets, Delzant test, volume, degree and face table.
    Info {
        #[command(flatten)]
        poly: PolytopeArgs,
    },
    /// Region classification, decay rate and boundary point on a grid.
    Regions {
        #[command(flatten)]
        poly: PolytopeArgs,
        /// `a:b:n` per axis, axes joined by `x`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value_t)]
        coords: Coords,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Full region report at one point.
    Decay {
        #[command(flatten)]
        poly: PolytopeArgs,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, value_enum, default_value_t)]
        coords: Coords,
        /// Also evaluate the path-integral form with this many Simpson steps.
        #[arg(long)]
        action_steps: Option<usize>,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Conditional Szegő kernel and expected mass density on a grid.
    Mass {
        #[command(flatten)]
        poly: PolytopeArgs,
        #[arg(long = "N")]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value_t)]
        coords: Coords,
    },
    /// `-(1/N) log Π` against the decay rate for increasing `N`.
    Converge {
        #[command(flatten)]
        poly: PolytopeArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, value_enum, default_value_t)]
        coords: Coords,
        #[arg(long = "Nmin", default_value_t = 1)]
        n_min: i64,
        #[arg(long = "Nmax")]
        n_max: i64,
        #[arg(long = "Nstep", default_value_t = 1)]
        n_step: i64,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Monte Carlo zeros of random polynomials (JSON statistics or CSV zero list).
    McZeros {
        #[command(flatten)]
        poly: PolytopeArgs,
        #[arg(long = "N")]
        n: i64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tentacle statistics (JSON) or amoeba points of one sample (CSV).
    Amoeba {
        #[command(flatten)]
        poly: PolytopeArgs,
        #[arg(long = "N")]
        n: i64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample stream used for the CSV point cloud.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// One-axis grid of `s_1` values for the CSV point cloud.
        #[arg(long, default_value = "-10:10:201", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value_t)]
        coords: Coords,
        /// Arguments of `z_1` per grid value.
        #[arg(long, default_value_t = 16)]
        phases: usize,
    },
    /// Compare the region solver with a closed-form oracle; exit 1 on mismatch.
    OracleCheck {
        /// `square`, `trapezoid` or `f<n>` for the Hirzebruch polytope with `n ≥ 2`.
        #[arg(long)]
        case: String,
        #[arg(long, default_value = "-5:5:40x-5:5:40", allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
        margin: f64,
    },
    /// Re-parse emitted CSV or JSON files.
    Validate { files: Vec<PathBuf> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Info { .. } => "info",
            Command::Regions { .. } => "regions",
            Command::Decay { .. } => "decay",
            Command::Mass { .. } => "mass",
            Command::Converge { .. } => "converge",
            Command::McZeros { .. } => "mc-zeros",
            Command::Amoeba { .. } => "amoeba",
            Command::OracleCheck { .. } => "oracle-check",
            Command::Validate { .. } => "validate",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::McZeros { seed, .. } | Command::Amoeba { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}
