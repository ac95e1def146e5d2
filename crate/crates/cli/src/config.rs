use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use inar_core::{CompoundSampling, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Lln,
    Clt,
    Mdp,
    Gamma,
    Cesaro,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    /// `f_k(θ)` and the running log-MGF.
    #[default]
    F,
    /// `Ḡ₁(k)`, `Ḡ₂(k)`.
    Gbar,
    /// Scaled log-MGF along `c(n) = n^β`.
    Mdp,
}

/// Everything a run needs; a config file and command-line flags both fill
/// it, flags taking precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<Model>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub beta: Option<f64>,
    pub theta: Option<Vec<f64>>,
    pub x_grid: Option<Vec<f64>>,
    pub x: Option<f64>,
    pub checks: Option<Vec<Check>>,
    pub table: Option<Table>,
    pub horizons: Option<Vec<usize>>,
    pub sampling: Option<CompoundSampling>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Unreadable or malformed input, reported as `path:line:column: message`.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        // serde_json appends " at line L column C"; keep the message only
        let msg = e.to_string();
        let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m).to_string();
        ConfigError(format!("{}:{}:{}: {msg}", path.display(), e.line(), e.column()))
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        read_json(path)
    }

    /// Fills unset fields from `other`.
    pub fn or(self, other: RunConfig) -> RunConfig {
        RunConfig {
            model: self.model.or(other.model),
            n: self.n.or(other.n),
            reps: self.reps.or(other.reps),
            seed: self.seed.or(other.seed),
            beta: self.beta.or(other.beta),
            theta: self.theta.or(other.theta),
            x_grid: self.x_grid.or(other.x_grid),
            x: self.x.or(other.x),
            checks: self.checks.or(other.checks),
            table: self.table.or(other.table),
            horizons: self.horizons.or(other.horizons),
            sampling: self.sampling.or(other.sampling),
            out: self.out.or(other.out),
            format: self.format.or(other.format),
        }
    }
}
