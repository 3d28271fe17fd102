//! Monte Carlo engines and the exact tree enumerator.

mod bpre;
mod immigration;
mod spine;
mod tree;

pub use bpre::{simulate_bpre, BprePath};
pub use immigration::{
    heavy_immigration_sampler, simulate_immigration, HeavyImmigrationStyle, ImmigrationLaw,
    ImmigrationPath, LogPareto, LOG_PARETO_CAP,
};
pub use spine::{simulate_spine, spine_as_immigration, SpineRealization, SpineSampler};
pub use tree::{
    enumerate_trees, gw_probability, simulate_tree, spine_path_probability, TreeRealization,
};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;

pub const DEFAULT_CAP: u64 = 1 << 32;
pub const CONDITIONING_BUDGET: u64 = 1_000_000;

/// A realised `Z_0..Z_n` with `W_k = Z_k/m^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationPath {
    pub z: Vec<u64>,
    pub w: Vec<f64>,
    /// first generation whose size exceeded the cap
    pub saturated_at: Option<usize>,
    pub cap: u64,
}

impl PopulationPath {
    pub fn saturated(&self) -> bool {
        self.saturated_at.is_some()
    }

    pub fn last(&self) -> u64 {
        *self.z.last().expect("paths have Z_0")
    }

    pub fn last_w(&self) -> f64 {
        *self.w.last().expect("paths have W_0")
    }

    pub fn extinct(&self) -> bool {
        self.last() == 0
    }
}

/// Deterministic mean growth used once a path has passed the cap.
pub(crate) fn saturated_step(z: u64, m: f64, cap: u64) -> u64 {
    let ceiling = cap as f64 * m.max(1.0);
    let next = (m * z as f64).round().min(ceiling);
    float_to_count(next)
}

pub(crate) fn float_to_count(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.max(0.0) as u64
    }
}

pub(crate) fn normalise(z: &[u64], m: f64) -> Vec<f64> {
    let mut scale = 1.0;
    z.iter()
        .map(|&v| {
            let w = v as f64 / scale;
            scale *= m;
            w
        })
        .collect()
}

/// `n` generations of a Galton-Watson process started from `z0` particles.
///
/// Once `Z_k` exceeds `cap` the path is flagged and continues as
/// `Z_{k+1} = round(m·Z_k)`, capped at `cap·m`.
pub fn simulate_path<R: Rng + ?Sized>(
    dist: &OffspringDistribution,
    n: usize,
    z0: u64,
    cap: u64,
    rng: &mut R,
) -> Result<PopulationPath> {
    if z0 < 1 {
        return Err(Error::InvalidArgument("initial population must be >= 1".into()));
    }
    if cap < z0 {
        return Err(Error::InvalidArgument(format!("cap {cap} below initial population {z0}")));
    }
    let m = dist.mean();
    let mut z = Vec::with_capacity(n + 1);
    z.push(z0);
    let mut saturated_at = None;
    let mut current = z0;
    for k in 1..=n {
        current = if saturated_at.is_some() {
            saturated_step(current, m, cap)
        } else {
            dist.sample_sum(current, rng)
        };
        if saturated_at.is_none() && current > cap {
            saturated_at = Some(k);
        }
        z.push(current);
    }
    let w = normalise(&z, m);
    Ok(PopulationPath { z, w, saturated_at, cap })
}

/// Result of rejection sampling `Z_n` given `Z_n > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionedDraw {
    pub value: u64,
    /// paths simulated, including the accepted one
    pub attempts: u64,
}

/// Draws `Z_n` conditioned on `Z_n > 0` by rejection, with a budget of 10⁶
/// attempts.
pub fn sample_conditioned<R: Rng + ?Sized>(
    dist: &OffspringDistribution,
    n: usize,
    rng: &mut R,
) -> Result<ConditionedDraw> {
    for attempts in 1..=CONDITIONING_BUDGET {
        let mut current = 1u64;
        for _ in 0..n {
            current = dist.sample_sum(current, rng);
            if current == 0 {
                break;
            }
        }
        if current > 0 {
            return Ok(ConditionedDraw { value: current, attempts });
        }
    }
    Err(Error::BudgetExhausted { budget: CONDITIONING_BUDGET })
}
