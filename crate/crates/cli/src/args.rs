use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rebac_core::{Mode, Semantics, Strategy};

#[derive(Debug, Parser)]
#[command(name = "rebac", version, about = "Relationship-based access control decision engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a single access request. Exits 0 on allow, 1 on deny.
    Check(CheckArgs),
    /// List the principals enabled for a (resource, user) pair.
    Match(MatchArgs),
    /// Keep the resources a user may access under a guard.
    Filter(FilterArgs),
    /// Administrative actions.
    #[command(subcommand)]
    Admin(AdminCommand),
    /// Generate a benchmark workload.
    Synth(SynthArgs),
    /// Run a benchmark configuration and write a CSV report.
    Bench(BenchArgs),
    /// Serve decisions over TCP as newline-delimited JSON.
    Serve(ServeArgs),
    /// Formula and policy checks.
    #[command(subcommand)]
    Fmt(FmtCommand),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Edge-list graph file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Policy JSON file.
    #[arg(long)]
    pub policy: PathBuf,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = Mode::Both)]
    pub mode: Mode,
    #[arg(long, default_value_t = Semantics::Liberal)]
    pub semantics: Semantics,
    #[arg(long, default_value_t = Strategy::Lazy)]
    pub strategy: Strategy,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long)]
    pub resource: String,
    #[arg(long)]
    pub user: String,
    /// Guard as JSON, e.g. '{"kind":"one-of","privileges":["read"]}', or
    /// @FILE.
    #[arg(long)]
    pub guard: String,
    /// Print the decision trace as JSON after the decision.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub resource: String,
    #[arg(long)]
    pub user: String,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long)]
    pub user: String,
    #[arg(long)]
    pub guard: String,
    /// Comma-separated resource ids.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub resources: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum AdminCommand {
    /// Actions enabled for a user on a patient.
    List {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        user: String,
        #[arg(long)]
        patient: String,
    },
    /// Execute an action and save the updated graph.
    Exec {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        action: String,
        #[arg(long)]
        user: String,
        #[arg(long)]
        patient: String,
        /// Participant binding NAME=VERTEX, repeatable.
        #[arg(long = "bind", value_name = "NAME=VERTEX")]
        bindings: Vec<String>,
        /// Write the graph here instead of overwriting --graph.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Generated graph size; defaults scale with --scale.
    #[arg(long, requires = "edges", conflicts_with = "edge_list")]
    pub nodes: Option<usize>,
    #[arg(long, requires = "nodes")]
    pub edges: Option<usize>,
    /// Label an existing `src dst` edge list instead of generating a graph.
    #[arg(long)]
    pub edge_list: Option<PathBuf>,
    /// Requests per guard kind.
    #[arg(long)]
    pub requests: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Configuration name (RoOne, ReAllLzLib, ...) or `all`.
    #[arg(long)]
    pub config: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:7878")]
    pub listen: String,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Subcommand)]
pub enum FmtCommand {
    /// Parse and validate a formula file (`id(vars) = text` per line) or a
    /// policy JSON document.
    Check { file: PathBuf },
}
