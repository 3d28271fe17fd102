//! Named, seeded experiments and their reports.

mod config;
mod critical;
mod exact;
mod growth;
mod registry;
mod report;
mod sampling;

pub use config::{parse_config, ConfigFlags, ExperimentConfig, ImmigrationSpec, LawSpec};
pub use registry::{list_experiments, run, ExperimentInfo, RunOutput};
pub use report::{ExperimentReport, Metric, Table, Tolerance, Verdict};

use crate::error::{Error, Result};
use crate::exec::{Execution, Replicator};
use crate::offspring::OffspringDistribution;
use crate::pgf::TruncatedLaw;
use report::Metric as M;

/// State shared by one experiment run.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub rep: Replicator,
    pub metrics: Vec<M>,
    pub tables: Vec<Table>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Self {
            cfg,
            rep: Replicator::new(cfg.seed, Execution::with_workers(cfg.workers)),
            metrics: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn offspring_or(&self, default: &[f64]) -> Result<OffspringDistribution> {
        match &self.cfg.offspring {
            Some(spec) => spec.build(),
            None => OffspringDistribution::finite(default),
        }
    }

    pub fn horizon_or(&self, default: usize) -> usize {
        self.cfg.horizon.unwrap_or(default)
    }

    pub fn replicates_or(&self, default: u64) -> u64 {
        self.cfg.replicates.unwrap_or(default)
    }

    pub fn metric(&mut self, m: M) {
        self.metrics.push(m);
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }
}

pub(crate) fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(what.to_string()))
    }
}

/// Empirical law of integer observations, truncated at the largest one.
pub(crate) fn empirical_law(values: &[u64]) -> TruncatedLaw {
    let k = values.iter().copied().max().unwrap_or(0).min(1 << 24) as usize;
    TruncatedLaw::from_counts(values.iter().copied(), k, "empirical")
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
