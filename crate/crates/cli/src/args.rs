use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "transit-epi", version, about = "Transit-aware agent-based SEIR simulator")]
pub struct Cli {
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Run a scenario or scenario grid and write curves and tables.
    Simulate(SimulateArgs),
    /// Evaluate transmissibility thresholds of a contact network.
    Threshold(ThresholdArgs),
    /// Write a synthetic town as an activity file and a GTFS feed.
    Generate(GenerateArgs),
    /// Rerun a command from its manifest and check the outputs.
    Replay(ReplayArgs),
}

/// Data selection shared by `simulate` and `threshold`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DataArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Share of the eligible rider pool removed, in [0, 1].
    #[arg(long)]
    pub pttcr_reduction: Option<f64>,
    #[arg(long)]
    pub close_schools: bool,
    /// Generate a synthetic town with this many persons.
    #[arg(long)]
    pub synthetic_scale: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Transit exposure threshold in minutes, or "inf".
    #[arg(long)]
    pub h_minutes: Option<String>,
    #[arg(long, conflicts_with = "beta")]
    pub r0: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub days: Option<u32>,
    #[arg(long)]
    pub replicates: Option<u32>,
    /// Also write the contact events of each simulated network.
    #[arg(long)]
    pub dump_contacts: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ThresholdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Edge list (i, j, kind, minutes) instead of a population.
    #[arg(long, conflicts_with_all = ["config", "synthetic_scale"])]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Remaining transit share(s), comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.75, 0.5, 0.25, 0.0])]
    pub alpha: Vec<f64>,
    /// Edge transmissibilities, comma separated.
    #[arg(long = "t", value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2])]
    pub transmissibility: Vec<f64>,
    /// Percolation oracle samples per row; 0 disables the oracle.
    #[arg(long, default_value_t = 0)]
    pub oracle_samples: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub synthetic_scale: usize,
    /// Total locations including homes; defaults to 42% of persons.
    #[arg(long)]
    pub locations: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}
