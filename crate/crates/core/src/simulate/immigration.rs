use rand::Rng;
use serde::Serialize;

use super::{normalise, saturated_step};
use crate::error::{Error, Result};
use crate::offspring::{OffspringDistribution, SizeBiasedDistribution};

/// Largest value a log-Pareto draw reports; larger draws are clamped here.
pub const LOG_PARETO_CAP: u64 = 1 << 62;

/// `P[Y >= k] = 1/(1 + ln k)` for `k >= 1`, so `E[log⁺ Y] = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LogPareto;

impl LogPareto {
    pub fn survival(k: u64) -> f64 {
        if k <= 1 {
            1.0
        } else {
            1.0 / (1.0 + (k as f64).ln())
        }
    }

    pub fn pmf(k: u64) -> f64 {
        if k == 0 {
            0.0
        } else {
            Self::survival(k) - Self::survival(k + 1)
        }
    }

    /// Inverse transform: `Y = floor(exp(1/U - 1))`. The flag reports a draw
    /// clamped to `LOG_PARETO_CAP`.
    pub fn sample_marked<R: Rng + ?Sized>(rng: &mut R) -> (u64, bool) {
        let u = 1.0 - rng.random::<f64>();
        let log_y = 1.0 / u - 1.0;
        if log_y >= (LOG_PARETO_CAP as f64).ln() {
            return (LOG_PARETO_CAP, true);
        }
        ((log_y.exp().floor() as u64).clamp(1, LOG_PARETO_CAP), false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeavyImmigrationStyle {
    LogPareto,
}

/// Law of the immigrant counts `Y_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum ImmigrationLaw {
    Zero,
    Law(OffspringDistribution),
    /// `L̂ - 1`
    SizeBiasedMinusOne(SizeBiasedDistribution),
    LogPareto,
}

impl ImmigrationLaw {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            ImmigrationLaw::Zero => 0,
            ImmigrationLaw::Law(d) => d.sample(rng),
            ImmigrationLaw::SizeBiasedMinusOne(b) => b.sample(rng) - 1,
            ImmigrationLaw::LogPareto => LogPareto::sample_marked(rng).0,
        }
    }

    /// Whether `E[log⁺ Y]` is finite.
    pub fn log_moment_finite(&self) -> bool {
        !matches!(self, ImmigrationLaw::LogPareto)
    }

    pub fn describe(&self) -> String {
        match self {
            ImmigrationLaw::Zero => "zero".into(),
            ImmigrationLaw::Law(d) => d.describe(),
            ImmigrationLaw::SizeBiasedMinusOne(b) => {
                format!("size-biased({}) - 1", b.base().describe())
            }
            ImmigrationLaw::LogPareto => "log-pareto".into(),
        }
    }
}

pub fn heavy_immigration_sampler(style: HeavyImmigrationStyle) -> ImmigrationLaw {
    match style {
        HeavyImmigrationStyle::LogPareto => ImmigrationLaw::LogPareto,
    }
}

/// Generation sizes of a branching process with immigration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImmigrationPath {
    pub z: Vec<u64>,
    /// `Y_1..Y_n`
    pub y: Vec<u64>,
    /// `Z_k/m^k`, present when `m > 1`
    pub normalised: Option<Vec<f64>>,
    pub saturated_at: Option<usize>,
    pub cap: u64,
}

impl ImmigrationPath {
    pub fn saturated(&self) -> bool {
        self.saturated_at.is_some()
    }

    pub fn last(&self) -> u64 {
        *self.z.last().expect("paths have Z_0")
    }
}

/// `Z_0 = 0`, `Z_k = Y_k + Σ_{i <= Z_{k-1}} L_{k,i}`. Saturation as for plain
/// paths, with immigrants still added after the cap is passed.
pub fn simulate_immigration<R: Rng + ?Sized>(
    offspring: &OffspringDistribution,
    immigration: &ImmigrationLaw,
    n: usize,
    cap: u64,
    rng: &mut R,
) -> Result<ImmigrationPath> {
    if cap < 1 {
        return Err(Error::InvalidArgument("cap must be >= 1".into()));
    }
    let m = offspring.mean();
    let mut z = Vec::with_capacity(n + 1);
    let mut y = Vec::with_capacity(n);
    z.push(0u64);
    let mut current = 0u64;
    let mut saturated_at = None;
    for k in 1..=n {
        let arrivals = immigration.sample(rng);
        let descendants = if saturated_at.is_some() {
            saturated_step(current, m, cap)
        } else {
            offspring.sample_sum(current, rng)
        };
        current = descendants.saturating_add(arrivals);
        if saturated_at.is_none() && current > cap {
            saturated_at = Some(k);
        }
        y.push(arrivals);
        z.push(current);
    }
    let normalised = (m > 1.0).then(|| normalise(&z, m));
    Ok(ImmigrationPath { z, y, normalised, saturated_at, cap })
}
