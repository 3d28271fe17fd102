use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::Distribution;
use serde::Serialize;

use super::{saturated_step, PopulationPath};
use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;

/// A path in an i.i.d. random environment with `w[k] = Z_k/M_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BprePath {
    pub path: PopulationPath,
    /// `M_0..M_n`, products of realised environment means
    pub m: Vec<f64>,
    /// index of the environment used in generations `1..=n`
    pub environments: Vec<usize>,
}

/// Each generation draws one environment from `environments` with the given
/// weights and applies it to every particle. With a single environment no
/// environment draws are made, so the result equals `simulate_path` on the
/// same random stream.
pub fn simulate_bpre<R: Rng + ?Sized>(
    environments: &[OffspringDistribution],
    weights: &[f64],
    n: usize,
    cap: u64,
    rng: &mut R,
) -> Result<BprePath> {
    if environments.is_empty() || environments.len() != weights.len() {
        return Err(Error::InvalidArgument(
            "need one weight per environment and at least one environment".into(),
        ));
    }
    if let Some(e) = environments.iter().find(|e| !(e.mean() > 0.0 && e.mean().is_finite())) {
        return Err(Error::InvalidLaw(format!(
            "environment {} needs a positive finite mean",
            e.describe()
        )));
    }
    if cap < 1 {
        return Err(Error::InvalidArgument("cap must be >= 1".into()));
    }
    let picker = WeightedIndex::new(weights)
        .map_err(|e| Error::InvalidArgument(format!("environment weights: {e}")))?;
    let mut z = vec![1u64];
    let mut w = vec![1.0];
    let mut m = vec![1.0];
    let mut chosen = Vec::with_capacity(n);
    let mut current = 1u64;
    let mut saturated_at = None;
    for k in 1..=n {
        let e = if environments.len() == 1 { 0 } else { picker.sample(rng) };
        let env = &environments[e];
        current = if saturated_at.is_some() {
            saturated_step(current, env.mean(), cap)
        } else {
            env.sample_sum(current, rng)
        };
        if saturated_at.is_none() && current > cap {
            saturated_at = Some(k);
        }
        let mk = m[k - 1] * env.mean();
        chosen.push(e);
        z.push(current);
        m.push(mk);
        w.push(current as f64 / mk);
    }
    Ok(BprePath {
        path: PopulationPath { z, w, saturated_at, cap },
        m,
        environments: chosen,
    })
}
