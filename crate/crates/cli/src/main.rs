mod commands;
mod config;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fikit::report::Outcome;

/// Hopf-Lax semigroups, optimal transport and functional-inequality checks on
/// finite metric measure spaces.
#[derive(Parser, Debug)]
#[command(name = "fikit", version)]
pub struct Cli {
    /// Flat JSON config document; flags take precedence over its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for generated families (default: FIKIT_SEED, else 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate spaces.
    Space {
        #[command(subcommand)]
        cmd: SpaceCmd,
    },
    /// Evaluate Q_t g on a space.
    Hopflax(HopflaxArgs),
    /// Run an inequality check.
    Check {
        #[command(subcommand)]
        cmd: CheckCmd,
    },
    /// Aggregate a directory of JSON reports into one table.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpaceCmd {
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Grid1d,
    Grid2d,
    Graph,
    Heisenberg,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Points of a grid1d, or vertices of a random graph.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub ax: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub bx: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub ay: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub by: Option<f64>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Graph edges as a `u,v,length` CSV; a random graph is drawn otherwise.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HopflaxCheck {
    Semigroup,
}

#[derive(Args, Debug)]
pub struct HopflaxArgs {
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// `point_id,value` CSV with the initial datum.
    #[arg(long)]
    pub g: Option<PathBuf>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Hamiltonian exponent; `L(u) = u^p / p` with the conjugate `p`.
    #[arg(long)]
    pub q: Option<f64>,
    /// Tabulated Hamiltonian as a `v,value` CSV; replaces `--q`.
    #[arg(long)]
    pub h_table: Option<PathBuf>,
    /// Superlinearity witness for the table: `value(v_max) / v_max` must exceed it.
    #[arg(long)]
    pub slope_bound: Option<f64>,
    /// Grid for the numeric Legendre transform, `start:stop:count`
    /// (default: up to 95% of the table's last slope).
    #[arg(long)]
    pub u_grid: Option<String>,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub check: Option<HopflaxCheck>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Directory for reports and the lockfile (default: next to `--out`).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

// Inputs shared by every check.
#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// `uniform`, `gaussian[:sigma]`, `gibbs[:beta[:p[:base]]]` or a CSV.
    #[arg(long)]
    pub measure: Option<String>,
    /// `exp`, `lipschitz`, `trig` or `file:PATH`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Exponents of the `exp` family, `start:stop:count`.
    #[arg(long, allow_negative_numbers = true)]
    pub lambdas: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Constants {
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// `start:stop:count`.
    #[arg(long)]
    pub t_grid: Option<String>,
    /// `start:stop:count`, or `log:start:stop:count`.
    #[arg(long)]
    pub eps_grid: Option<String>,
    /// Endpoint pairs for the convexity audit.
    #[arg(long)]
    pub pairs: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub constants: Constants,
}

#[derive(Subcommand, Debug)]
pub enum CheckCmd {
    /// Log-Sobolev inequality with constant K, per function.
    Lsi(CheckArgs),
    /// Transport-entropy inequality, per measure.
    Talagrand(CheckArgs),
    /// Exponential-integrability form via Q_1, per function.
    DualTalagrand(CheckArgs),
    /// Hypercontractivity of Q_t along a time grid, per function.
    Hc(CheckArgs),
    /// Monotonicity of t -> log-moment of Q_t f, per function.
    Phi(CheckArgs),
    /// HWI inequality, per measure.
    Hwi(CheckArgs),
    /// Entropy convexity along displacement interpolations.
    GeodesicEntropy(CheckArgs),
    /// Slope probe of the Hopf-Lax semigroup at small times.
    Slopes(CheckArgs),
    /// Estimate K from LSI, then test the transport inequality.
    SuiteLsi2tal(CheckArgs),
    /// Estimate K from the transport inequality, then test LSI.
    SuiteTal2lsi(CheckArgs),
}

fn exit_code(outcome: Option<Outcome>) -> u8 {
    match outcome {
        None | Some(Outcome::Pass) => 0,
        Some(Outcome::Fail) => 1,
        Some(Outcome::Inconclusive) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(threads) = std::env::var("FIKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        fikit::par::init_threads(threads);
    }
    match commands::run(cli) {
        Ok(outcome) => ExitCode::from(exit_code(outcome)),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
