use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use xhermite_core::Partition;

use crate::tolerances::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Construct,
    Zeros,
    Hessian,
    Gersgorin,
    Dnu,
    Optimality,
    Semicircle,
    Sweep,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Construct => "construct",
            Scenario::Zeros => "zeros",
            Scenario::Hessian => "hessian",
            Scenario::Gersgorin => "gersgorin",
            Scenario::Dnu => "dnu",
            Scenario::Optimality => "optimality",
            Scenario::Semicircle => "semicircle",
            Scenario::Sweep => "sweep",
        }
    }

    fn requires(self) -> &'static [Scenario] {
        use Scenario::*;
        match self {
            Construct => &[],
            Zeros => &[Construct],
            Hessian | Semicircle | Dnu | Optimality => &[Zeros],
            Gersgorin => &[Hessian],
            Sweep => &[Gersgorin, Semicircle],
        }
    }

    pub const ALL: [Scenario; 8] = [
        Scenario::Construct,
        Scenario::Zeros,
        Scenario::Hessian,
        Scenario::Gersgorin,
        Scenario::Dnu,
        Scenario::Optimality,
        Scenario::Semicircle,
        Scenario::Sweep,
    ];
}

/// Available precision tiers in bits; requests round up.
pub const PRECISION_TIERS: [usize; 5] = [128, 192, 256, 384, 512];

fn default_precision() -> usize {
    192
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub partition: Vec<i64>,
    pub n_values: Vec<usize>,
    #[serde(default = "default_precision")]
    pub precision_bits: usize,
    pub scenarios: BTreeSet<Scenario>,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid partition: {0}")]
    Partition(#[from] xhermite_core::Error),
    #[error("n_values is empty")]
    NoDegrees,
    #[error("n = {n} gives degree {degree}, which is not admissible: degrees below {min_degree} and {excluded:?} are excluded")]
    Inadmissible { n: usize, degree: usize, min_degree: usize, excluded: Vec<usize> },
    #[error("precision_bits = {0} outside 64..=512")]
    Precision(usize),
    #[error("unknown tolerance {0:?}")]
    UnknownTolerance(String),
    #[error("reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing config: {0}")]
    Json(#[from] serde_json::Error),
}

/// A checked configuration: dependencies added, precision on a tier,
/// tolerances resolved.
#[derive(Clone, Debug, Serialize)]
pub struct Validated {
    pub lambda: Partition,
    pub n_values: Vec<usize>,
    pub precision_bits: usize,
    pub scenarios: BTreeSet<Scenario>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

pub fn precision_tier(bits: usize) -> Result<usize, ConfigError> {
    if bits < 64 {
        return Err(ConfigError::Precision(bits));
    }
    PRECISION_TIERS.iter().copied().find(|&t| t >= bits).ok_or(ConfigError::Precision(bits))
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn validate(&self) -> Result<Validated, ConfigError> {
        let lambda = Partition::new(&self.partition)?;
        let mut scenarios = BTreeSet::new();
        let mut stack: Vec<Scenario> = self.scenarios.iter().copied().collect();
        while let Some(s) = stack.pop() {
            if scenarios.insert(s) {
                stack.extend_from_slice(s.requires());
            }
        }
        if scenarios.iter().any(|&s| s != Scenario::Construct) {
            lambda.require_even()?;
        }
        if self.n_values.is_empty() {
            return Err(ConfigError::NoDegrees);
        }
        let m = lambda.size();
        for &n in &self.n_values {
            if !lambda.is_admissible(m + n) {
                return Err(ConfigError::Inadmissible {
                    n,
                    degree: m + n,
                    min_degree: lambda.min_degree(),
                    excluded: lambda.excluded_degrees(),
                });
            }
        }
        let mut n_values = self.n_values.clone();
        n_values.sort_unstable();
        n_values.dedup();
        Ok(Validated {
            lambda,
            n_values,
            precision_bits: precision_tier(self.precision_bits)?,
            scenarios,
            seed: self.seed,
            tolerances: Tolerances::default().with_overrides(&self.tolerances)?,
        })
    }
}
