//! Flag and config-file handling. Flags win over the file, the file wins
//! over `SPINREF_SEED`, and that wins over built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use spinref_core::cooling::Phase2Schedule;
use spinref_core::thermal::BiasModel;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Binomial,
    Markov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Common {
    /// Number of input bits.
    #[arg(long)]
    pub n: Option<usize>,
    /// Initial bias: a bit is 0 with probability (1 + epsilon) / 2.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Correlation length of the markov model.
    #[arg(long)]
    pub ell: Option<usize>,
    /// First seed; trial i uses seed + i. Defaults to $SPINREF_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Bias at which phase 1 stops.
    #[arg(long, visible_alias = "target")]
    pub target_bias: Option<f64>,
    /// Phase 2 switches to whole-block bins once k exceeds n^alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Directory for per-trial CSV/JSON artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent trials.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON file with any of the above keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Fully resolved settings. `out` and `jobs` are left out of reports so
/// they cannot change emitted bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub n: usize,
    pub epsilon: f64,
    pub model: ModelKind,
    pub ell: usize,
    pub seed: u64,
    pub trials: usize,
    pub target_bias: f64,
    pub alpha: f64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub jobs: usize,
}

fn load(path: &Path) -> Result<Common, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("bad config {}: {e}", path.display())))
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var("SPINREF_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| Failure::Invalid(format!("SPINREF_SEED is not a seed: {s:?}"))),
        Err(_) => Ok(None),
    }
}

impl ExperimentConfig {
    pub fn resolve(command: &str, flags: &Common) -> Result<Self, Failure> {
        let file = match &flags.config {
            Some(p) => load(p)?,
            None => Common::default(),
        };
        macro_rules! pick {
            ($f:ident, $default:expr) => {
                flags.$f.clone().or(file.$f.clone()).unwrap_or($default)
            };
        }
        let seed = match flags.seed.or(file.seed) {
            Some(s) => s,
            None => env_seed()?.unwrap_or(0),
        };
        let cfg = ExperimentConfig {
            command: command.to_string(),
            n: pick!(n, 1_000_000),
            epsilon: pick!(epsilon, 0.25),
            model: pick!(model, ModelKind::Binomial),
            ell: pick!(ell, 10),
            seed,
            trials: pick!(trials, 1),
            target_bias: pick!(target_bias, 0.856),
            alpha: pick!(alpha, 0.3),
            format: pick!(format, Format::Csv),
            out: flags.out.clone().or(file.out.clone()),
            jobs: pick!(jobs, 1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::Invalid(m));
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return bad(format!("epsilon must lie in (0, 1], got {}", self.epsilon));
        }
        if !(self.target_bias > 0.0 && self.target_bias < 1.0) {
            return bad(format!("target bias must lie in (0, 1), got {}", self.target_bias));
        }
        if self.trials == 0 || self.jobs == 0 {
            return bad("trials and jobs must be positive".into());
        }
        if self.ell == 0 {
            return bad("ell must be at least 1".into());
        }
        self.schedule().validate().map_err(Failure::from)?;
        self.model().validate().map_err(Failure::from)
    }

    pub fn model(&self) -> BiasModel {
        match self.model {
            ModelKind::Binomial => BiasModel::binomial(self.epsilon),
            ModelKind::Markov => BiasModel::markov(self.epsilon, self.ell),
        }
    }

    pub fn schedule(&self) -> Phase2Schedule {
        Phase2Schedule { alpha: self.alpha }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.trials as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }
}
