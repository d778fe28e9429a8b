use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod density;
mod error;
mod input;
mod output;
mod tauber;
mod value;

use error::{CliError, Status};

#[derive(Parser)]
#[command(name = "tauberlab", version, about = "Density diagnostics, game values and uniform Tauberian checks")]
struct Cli {
    /// Output directory for CSV and SVG reports.
    #[arg(long, global = true, env = "TAUBERLAB_OUT", default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flatness, regularity, escape and quantile diagnostics of a density family.
    Density(DensityArgs),
    /// Value tables of a game model under a density family.
    Value(ValueArgs),
    /// Tauberian and Abelian checks, axiom checks and strategy schedules.
    Tauber(TauberArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Diag {
    Flat,
    Regular,
    Escape,
    Quantile,
}

#[derive(Args)]
pub struct DensityArgs {
    /// cesaro, exp, bump, gen:const:c, gen:affine:a:b, gen:exp:a, gen:sinsq:a:w or a family file.
    #[arg(long)]
    pub family: String,
    /// λ grid as start:end:geomN or start:end:linN.
    #[arg(long)]
    pub lambda_grid: Option<String>,
    #[arg(long, value_enum, default_value = "flat")]
    pub diag: Diag,
    /// Mass level for the regularity diagnostic.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Mass levels for flatness and quantile tables.
    #[arg(long)]
    pub r_grid: Option<String>,
    /// Horizons for the escape diagnostic.
    #[arg(long)]
    pub t_grid: Option<String>,
}

#[derive(Args)]
pub struct ValueArgs {
    /// bundled/<name> or a model file.
    #[arg(long)]
    pub model: String,
    /// Defaults to the family in the model file, else cesaro.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub lambda_grid: Option<String>,
    #[arg(long, default_value_t = 0.999)]
    pub horizon_mass: f64,
    /// Exhaustive policy enumeration over a fixed number of steps.
    #[arg(long)]
    pub brute: bool,
    /// Steps for --brute.
    #[arg(long, default_value_t = 5)]
    pub horizon: usize,
    /// Seed for bundled/random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Corollary,
    Tauber,
    Abel,
    Axioms,
    Hardy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Schedule {
    Geometric,
    Partition,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategies {
    /// Sets induced by history-aware policies.
    Policy,
    /// Listed stationary policies only.
    Stationary,
    /// A MAX set pinned to one path from the first state.
    Pinned,
    /// A MAX/MIN pair with no common process.
    Clash,
}

#[derive(Args)]
pub struct TauberArgs {
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    #[arg(long, value_enum)]
    pub schedule: Option<Schedule>,
    /// bundled/<name> or a model file; repeat or comma-separate. Defaults to every bundled model.
    #[arg(long, value_delimiter = ',')]
    pub model: Vec<String>,
    /// Families to compare, comma-separated.
    #[arg(long, default_value = "cesaro,exp")]
    pub families: String,
    /// Family for --schedule; defaults to cesaro (geometric) or exp (partition).
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub lambda_grid: Option<String>,
    #[arg(long, default_value_t = 0.999)]
    pub horizon_mass: f64,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub mu: f64,
    /// Regularity bound M for the partition schedule; measured when omitted.
    #[arg(long)]
    pub m_bound: Option<f64>,
    /// Horizon in steps for --check axioms.
    #[arg(long, default_value_t = 4)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value = "policy")]
    pub strategies: Strategies,
    /// Periodic signal for --check hardy, e.g. 1,0; defaults to periods 2 and 3.
    #[arg(long)]
    pub period: Option<String>,
    /// Also write gap-vs-λ SVG charts.
    #[arg(long)]
    pub svg: bool,
    /// Seed for bundled/random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Density(a) => density::run(a),
        Command::Value(a) => value::run(a),
        Command::Tauber(a) => tauber::run(a),
    };
    let outcome = result.and_then(|(status, artifacts)| {
        for p in artifacts.write_all(&cli.out)? {
            println!("wrote {}", p.display());
        }
        Ok(status)
    });
    match outcome {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => {
            eprintln!("check failed");
            ExitCode::from(CliError::CHECK_FAILED)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit_code()
        }
    }
}
