use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "littlewood", version, about = "Certified L1 norms of exponential sums")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand. Anything left unset falls back to
/// the config file, then to the environment, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON config file; flags take precedence over its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Target relative error of certified norm enclosures.
    #[arg(long, global = true)]
    pub rel_err: Option<f64>,
    /// Constant in the harmonic lower bound.
    #[arg(long, global = true)]
    pub c_mps: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest sample grid in bytes.
    #[arg(long, global = true)]
    pub memory_budget: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Exit 0 even when a verdict fails.
    #[arg(long, global = true)]
    pub no_fail: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Generate a structured set and its certificate.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// JSON object of generator parameters.
        #[arg(long, default_value = "{}")]
        params: String,
    },
    /// Certified L1 norm of a set or polynomial.
    Norm {
        /// Set shorthand such as `interval:101` or `box:8x8`.
        #[arg(long, conflicts_with = "input")]
        set: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Exact values of the flat-top kernel.
    Kernel {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        /// Period for the discrete L1 norm; defaults to the smallest legal one.
        #[arg(long)]
        period: Option<usize>,
    },
    /// Keep the blocks of a residue class by kernel multiplication.
    Thin {
        #[arg(long, conflicts_with = "input")]
        set: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        d1: i64,
        #[arg(long)]
        d2: i64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        q: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
    },
    /// Check one inequality or property on an input or a seeded run.
    Verify {
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long, conflicts_with = "set")]
        input: Option<PathBuf>,
        #[arg(long)]
        set: Option<String>,
        /// Use `c^r` instead of the derived constant for multidimz.
        #[arg(long)]
        empirical_c: Option<f64>,
    },
    /// Run every acceptance criterion.
    Suite {
        /// Corrupt one kernel value; the kernel criteria must then fail.
        #[arg(long)]
        fault_kernel: bool,
        /// Restrict to these criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::Norm { .. } => "norm",
            Command::Kernel { .. } => "kernel",
            Command::Thin { .. } => "thin",
            Command::Verify { .. } => "verify",
            Command::Suite { .. } => "suite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Gap,
    LatticeBox,
    LatticeRandom,
    ZstrongBox,
    ZstrongRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Mps,
    BasicMultidim,
    Multidim,
    MainProp,
    Multidimz,
    Bernstein,
    Numerical,
    Kernel,
    Thinning,
    GoodModulus,
}
