use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;
mod parse;

#[derive(Parser)]
#[command(name = "conlab", version, about = "Consensus laboratory for dynamic directed networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural report of a network model.
    Analyze(AnalyzeArgs),
    /// Run an algorithm under a communication pattern.
    Simulate(SimulateArgs),
    /// Run a valency-maximizing adversary against an algorithm.
    Adversary(AdversaryArgs),
    /// Asynchronous crash-fault simulation.
    Async(AsyncArgs),
    /// Approximate consensus with a decision round.
    Approx(ApproxArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Directory receiving the output files; stdout otherwise.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed of every random choice; required by sampling commands.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative tolerance of valency brackets.
    #[arg(long, default_value_t = conlab::engine::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Single graph file, used as a one-graph model.
    #[arg(long, conflicts_with = "model")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub algorithm: Option<String>,
    /// Agent inputs: `0,1,0.5` for scalars or `0,1;2,3` for points.
    #[arg(long)]
    pub inputs: String,
    /// constant:I | cyclic:I,J,.. | iid | sigma | sigma:I,J,.. | recorded:FILE | rooted | nonsplit
    #[arg(long, default_value = "constant:0")]
    pub pattern: String,
    #[arg(long)]
    pub rounds: usize,
    /// Edge probability of random rooted or non-split graphs.
    #[arg(long, default_value_t = 0.3)]
    pub edge_prob: f64,
    /// Also bracket the valency of every configuration over the model.
    #[arg(long)]
    pub bracket: bool,
    #[arg(long)]
    pub approx: bool,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub regime: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct AdversaryArgs {
    /// Greedy adversary over this model.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Phase adversary over σ-blocks of Ψ graphs on this many agents.
    #[arg(long, conflicts_with = "model")]
    pub psi: Option<usize>,
    #[arg(long)]
    pub algorithm: String,
    #[arg(long)]
    pub inputs: String,
    /// Rounds of the greedy adversary, or phases of the Ψ adversary.
    #[arg(long)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub depth: usize,
    #[arg(long, default_value_t = conlab::engine::DEFAULT_BRANCH_CAP)]
    pub branch_cap: usize,
    #[arg(long, default_value_t = conlab::engine::DEFAULT_ROUND_BUDGET)]
    pub budget: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct AsyncArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub f: usize,
    /// `minrelay` or `round:<algorithm>`.
    #[arg(long, default_value = "minrelay")]
    pub algorithm: String,
    /// Agent inputs; defaults to `0,1,..,n-1`.
    #[arg(long)]
    pub inputs: Option<String>,
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Use the chain-crash schedule that delays agreement to time f+1.
    #[arg(long, conflicts_with = "schedule")]
    pub worst_case: bool,
    /// Draw a random crash schedule from the seed.
    #[arg(long, conflicts_with_all = ["schedule", "worst_case"])]
    pub random_schedule: bool,
    /// constant:D | uniform | lattice:STEPS
    #[arg(long, default_value = "constant:1")]
    pub delays: String,
    /// Simulated time; defaults to f+1.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Rounds of a round-based algorithm.
    #[arg(long, default_value_t = 10)]
    pub rounds: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ApproxArgs {
    /// two_agent | nonsplit_midpoint | rooted_amortized
    #[arg(long)]
    pub regime: String,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub inputs: String,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Defaults to iid over the two-agent model, or random graphs of the
    /// regime's class.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long, default_value_t = 0.3)]
    pub edge_prob: f64,
    /// Rounds to run; defaults to the decision round.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Adversary(a) => commands::adversary(&a),
        Command::Async(a) => commands::run_async(&a),
        Command::Approx(a) => commands::approx(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
