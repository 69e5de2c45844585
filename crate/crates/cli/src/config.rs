use std::path::{Path, PathBuf};

use littlewood::bounds::DEFAULT_C_MPS;
use littlewood::GridBudget;
use serde::{Deserialize, Serialize};

use crate::args::{Format, GlobalArgs};
use crate::error::CliError;

/// Environment variable overriding the grid memory budget (bytes).
pub const BUDGET_ENV: &str = "LITTLEWOOD_MEMORY_BUDGET";

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rel_err: Option<f64>,
    pub c_mps: Option<f64>,
    pub seed: Option<u64>,
    pub memory_budget: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub no_fail: Option<bool>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Fully resolved settings, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// `None` lets each operation use its own default.
    pub rel_err: Option<f64>,
    pub c_mps: f64,
    pub seed: u64,
    pub memory_budget: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub no_fail: bool,
}

impl Settings {
    /// Precedence: flags, then environment, then config file, then defaults.
    pub fn resolve(args: &GlobalArgs, env_budget: Option<&str>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let env_budget = env_budget
            .map(|v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|e| CliError::Usage(format!("{BUDGET_ENV}={v}: {e}")))
            })
            .transpose()?;
        let settings = Settings {
            rel_err: args.rel_err.or(file.rel_err),
            c_mps: args.c_mps.or(file.c_mps).unwrap_or(DEFAULT_C_MPS),
            seed: args.seed.or(file.seed).unwrap_or(0),
            memory_budget: args
                .memory_budget
                .or(env_budget)
                .or(file.memory_budget)
                .unwrap_or(GridBudget::DEFAULT_BYTES),
            output: args.output.clone().or(file.output),
            format: args.format.or(file.format).unwrap_or_default(),
            no_fail: args.no_fail || file.no_fail.unwrap_or(false),
        };
        settings.validate()?;
        Ok(settings)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(r) = self.rel_err {
            if !(r > 0.0 && r < 1.0) {
                return Err(CliError::Usage(format!("--rel-err must lie in (0, 1), got {r}")));
            }
        }
        if !(self.c_mps.is_finite() && self.c_mps > 0.0) {
            return Err(CliError::Usage(format!("--c-mps must be positive, got {}", self.c_mps)));
        }
        if self.memory_budget == 0 {
            return Err(CliError::Usage("memory budget must be positive".into()));
        }
        Ok(())
    }

    pub fn budget(&self) -> GridBudget {
        GridBudget::new(self.memory_budget)
    }

    pub fn rel_err_or(&self, default: f64) -> f64 {
        self.rel_err.unwrap_or(default)
    }
}
