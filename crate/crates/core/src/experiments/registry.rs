use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::report::{overall, ExperimentReport, Table};
use super::{critical, exact, growth, sampling, Ctx};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// the result the experiment reproduces
    pub anchor: &'static str,
}

pub(crate) struct Entry {
    pub info: ExperimentInfo,
    run: fn(&mut Ctx) -> Result<()>,
}

const fn entry(
    name: &'static str,
    anchor: &'static str,
    description: &'static str,
    run: fn(&mut Ctx) -> Result<()>,
) -> Entry {
    Entry { info: ExperimentInfo { name, description, anchor }, run }
}

static REGISTRY: [Entry; 12] = [
    entry(
        "kesten-stigum",
        "Kesten-Stigum theorem",
        "E[W_n] = 1 and P[W_n ~ 0] = q under finite E[L log L]; median W_n collapse for a heavy-tailed law",
        growth::kesten_stigum,
    ),
    entry(
        "seneta",
        "Seneta's theorem for supercritical processes with immigration",
        "W_n settles under bounded immigration; log-Pareto immigration classified by growth of log Z_n",
        growth::seneta,
    ),
    entry(
        "heathcote",
        "Heathcote's theorem for subcritical processes with immigration",
        "Z_n stabilises in law under bounded immigration and drifts upward under log-Pareto immigration",
        growth::heathcote,
    ),
    entry(
        "kolmogorov",
        "Kolmogorov's estimate n P[Z_n > 0] -> 2/sigma^2",
        "exact survival iteration for a critical law, plus the critical geometric closed form",
        critical::kolmogorov,
    ),
    entry(
        "yaglom",
        "Yaglom's exponential limit law",
        "rejection-conditioned Z_n/n against the exponential law with mean sigma^2/2",
        critical::yaglom,
    ),
    entry(
        "harris-spine",
        "Harris's two-exponential law of the size-biased critical tree",
        "spine samples of Z_n/n against gamma(2, sigma^2/2); left and right counts against exponentials",
        critical::harris_spine,
    ),
    entry(
        "subcritical-rate",
        "Heathcote-Seneta-Vere-Jones theorem on P[Z_n > 0]/m^n",
        "exact monotonicity of P[Z_n > 0]/m^n, its positive limit, and its decay for a heavy-tailed law",
        exact::subcritical_rate,
    ),
    entry(
        "williamson",
        "summability of total variation between successive conditioned laws",
        "exact conditioned laws of Z_n: summed total variation increments and stochastic monotonicity",
        exact::williamson,
    ),
    entry(
        "measure-identity",
        "size-biased tree measure identities",
        "exact enumeration: spine construction probabilities against m^-n GW[t] and W_n(t) GW[t]",
        exact::measure_identity,
    ),
    entry(
        "spine-immigration",
        "spine decomposition as a branching process with immigration",
        "spine law of Z_2 against the size-biased series law; spine minus one against direct immigration",
        sampling::spine_immigration,
    ),
    entry(
        "pakes-khattree",
        "Pakes-Khattree characterisation of the exponential law",
        "U times a size-biased resample agrees with the sample exactly for exponential inputs",
        sampling::pakes_khattree,
    ),
    entry(
        "bpre",
        "Tanny's theorem for i.i.d. random environments",
        "mean of Z_n/M_n for a two-environment mixture",
        growth::bpre,
    ),
];

/// All registered experiments in a fixed order.
pub fn list_experiments() -> Vec<ExperimentInfo> {
    REGISTRY.iter().map(|e| e.info).collect()
}

pub(crate) fn lookup(name: &str) -> Result<&'static Entry> {
    REGISTRY.iter().find(|e| e.info.name == name).ok_or_else(|| Error::UnknownExperiment {
        name: name.to_string(),
        known: REGISTRY.iter().map(|e| e.info.name).collect::<Vec<_>>().join(", "),
    })
}

/// A finished run: the report and its side tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub tables: Vec<Table>,
}

impl RunOutput {
    /// Report JSON; `stable` drops the wall-clock duration.
    pub fn report_json(&self, stable: bool) -> Result<String> {
        if stable {
            let mut r = self.report.clone();
            r.duration_seconds = None;
            r.to_json()
        } else {
            self.report.to_json()
        }
    }

    /// Writes `report.json` and every table into `dir`.
    pub fn write(&self, dir: &Path, stable: bool) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in &self.tables {
            t.write(dir)?;
        }
        std::fs::write(dir.join("report.json"), self.report_json(stable)?)?;
        Ok(())
    }
}

/// Runs the configured experiment. Nothing is written to disk.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let entry = lookup(&config.name)?;
    let start = Instant::now();
    let mut ctx = Ctx::new(config);
    (entry.run)(&mut ctx).map_err(|e| e.context(format!("experiment `{}`", config.name)))?;
    let Ctx { metrics, tables, .. } = ctx;
    let report = ExperimentReport {
        experiment: entry.info.name.to_string(),
        description: entry.info.description.to_string(),
        anchor: entry.info.anchor.to_string(),
        config: config.clone(),
        passed: overall(&metrics),
        metrics,
        tables: tables.iter().map(|t| t.file.clone()).collect(),
        duration_seconds: Some(start.elapsed().as_secs_f64()),
        version: format!("bplab {}", env!("CARGO_PKG_VERSION")),
    };
    Ok(RunOutput { report, tables })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_listing() {
        let list = list_experiments();
        assert_eq!(list.len(), 12);
        assert!(list.iter().any(|e| e.name == "kolmogorov"));
        assert!(list.iter().all(|e| !e.anchor.is_empty()));
        let mut names: Vec<_> = list.iter().map(|e| e.name).collect();
        names.dedup();
        assert_eq!(names.len(), 12);
    }

    #[test]
    fn unknown_name_lists_registry() {
        let err = match lookup("foo") {
            Err(e) => e.to_string(),
            Ok(_) => panic!("lookup of foo succeeded"),
        };
        assert!(err.contains("kolmogorov") && err.contains("foo"));
    }
}
