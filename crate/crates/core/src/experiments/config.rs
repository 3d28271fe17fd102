use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::default_workers;
use crate::offspring::OffspringDistribution;
use crate::pgf::DEFAULT_K;
use crate::simulate::{ImmigrationLaw, DEFAULT_CAP};

const PMF_SUM_TOLERANCE: f64 = 1e-9;

/// Offspring law as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawSpec {
    Finite { pmf: Vec<f64> },
    Geometric { p: f64 },
    TruncatedPoisson { rate: f64, cutoff: u64 },
    HeavyTail {
        alpha: f64,
        #[serde(default = "default_atom")]
        atom: u64,
        cutoff: u64,
    },
}

fn default_atom() -> u64 {
    2
}

impl LawSpec {
    pub fn finite(pmf: &[f64]) -> Self {
        LawSpec::Finite { pmf: pmf.to_vec() }
    }

    pub fn build(&self) -> Result<OffspringDistribution> {
        match self {
            LawSpec::Finite { pmf } => {
                let sum: f64 = pmf.iter().sum();
                if (sum - 1.0).abs() > PMF_SUM_TOLERANCE {
                    return Err(Error::Config(format!("pmf sums to {sum}, not 1")));
                }
                OffspringDistribution::finite(pmf)
            }
            LawSpec::Geometric { p } => OffspringDistribution::geometric(*p),
            LawSpec::TruncatedPoisson { rate, cutoff } => {
                OffspringDistribution::truncated_poisson(*rate, *cutoff)
            }
            LawSpec::HeavyTail { alpha, atom, cutoff } => {
                OffspringDistribution::heavy_tail_with_atom(*alpha, *atom, *cutoff)
            }
        }
    }
}

/// Immigration law as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ImmigrationSpec {
    Zero,
    LogPareto,
    /// `L̂ - 1` for the experiment's offspring law
    SizeBiasedMinusOne,
    Law { law: LawSpec },
}

impl ImmigrationSpec {
    pub fn build(&self, offspring: &OffspringDistribution) -> Result<ImmigrationLaw> {
        Ok(match self {
            ImmigrationSpec::Zero => ImmigrationLaw::Zero,
            ImmigrationSpec::LogPareto => ImmigrationLaw::LogPareto,
            ImmigrationSpec::SizeBiasedMinusOne => {
                ImmigrationLaw::SizeBiasedMinusOne(offspring.size_biased()?)
            }
            ImmigrationSpec::Law { law } => ImmigrationLaw::Law(law.build()?),
        })
    }
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    /// offspring law; each experiment has its own default
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offspring: Option<LawSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub immigration: Option<ImmigrationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<u64>,
    pub k: usize,
    pub cap: u64,
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Config with every default filled in.
    pub fn new(name: &str, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            seed,
            offspring: None,
            immigration: None,
            horizon: None,
            replicates: None,
            k: DEFAULT_K,
            cap: DEFAULT_CAP,
            workers: default_workers(),
            out: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        super::registry::lookup(&self.name)?;
        if self.replicates == Some(0) {
            return Err(Error::Config("replicate count must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("worker count must be >= 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("truncation K must be >= 1".into()));
        }
        if self.cap == 0 {
            return Err(Error::Config("cap must be >= 1".into()));
        }
        if let Some(law) = &self.offspring {
            law.build()?;
        }
        if let Some(ImmigrationSpec::Law { law }) = &self.immigration {
            law.build()?;
        }
        Ok(())
    }
}

/// The same fields as `ExperimentConfig`, all optional, as read from a file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    name: Option<String>,
    seed: Option<u64>,
    offspring: Option<LawSpec>,
    immigration: Option<ImmigrationSpec>,
    horizon: Option<usize>,
    replicates: Option<u64>,
    k: Option<usize>,
    cap: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
}

/// Command-line values; each one overrides the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFlags {
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Reads an optional JSON config file, applies flags, fills defaults and
/// validates the result.
pub fn parse_config(file: Option<&Path>, flags: &ConfigFlags) -> Result<ExperimentConfig> {
    let partial: PartialConfig = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("malformed {}: {e}", path.display())))?
        }
        None => PartialConfig::default(),
    };
    let name = match (&flags.name, &partial.name) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config(format!(
                "experiment named `{a}` on the command line but `{b}` in the config file"
            )))
        }
        (Some(a), _) => a.clone(),
        (None, Some(b)) => b.clone(),
        (None, None) => return Err(Error::Config("no experiment name given".into())),
    };
    let seed = flags
        .seed
        .or(partial.seed)
        .ok_or_else(|| Error::Config("a seed is required".into()))?;
    let config = ExperimentConfig {
        name,
        seed,
        offspring: partial.offspring,
        immigration: partial.immigration,
        horizon: partial.horizon,
        replicates: partial.replicates,
        k: partial.k.unwrap_or(DEFAULT_K),
        cap: partial.cap.unwrap_or(DEFAULT_CAP),
        workers: flags.workers.or(partial.workers).unwrap_or_else(default_workers),
        out: flags.out.clone().or(partial.out),
    };
    config.validate()?;
    Ok(config)
}
