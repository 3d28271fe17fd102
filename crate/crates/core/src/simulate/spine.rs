use rand::Rng;
use serde::Serialize;

use super::immigration::ImmigrationPath;
use crate::error::Result;
use crate::offspring::{OffspringDistribution, SizeBiasedDistribution};

/// One size-biased tree to depth `n`, summarised along its spine.
///
/// `right[k]` counts generation-`k` vertices at or to the right of `v_k`
/// (so it includes `v_k`); `left[k]` counts those strictly to its left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpineRealization {
    pub n: usize,
    /// `L̂_1..L̂_n`
    pub lhat: Vec<u64>,
    /// 1-based position of `v_j` among the children of `v_{j-1}`
    pub pos: Vec<u64>,
    pub z: Vec<u64>,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

/// Spine sampler holding the size-biased law of one offspring law.
#[derive(Debug, Clone)]
pub struct SpineSampler {
    dist: OffspringDistribution,
    biased: SizeBiasedDistribution,
}

impl SpineSampler {
    pub fn new(dist: &OffspringDistribution) -> Result<Self> {
        Ok(Self { dist: dist.clone(), biased: dist.size_biased()? })
    }

    pub fn biased(&self) -> &SizeBiasedDistribution {
        &self.biased
    }

    /// Runs the construction for `n` generations.
    ///
    /// Bushes rooted on the same side of the spine are independent
    /// Galton-Watson processes, so each side is advanced as a single process
    /// with several ancestors.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> SpineRealization {
        let mut s = SpineRealization {
            n,
            lhat: Vec::with_capacity(n),
            pos: Vec::with_capacity(n),
            z: Vec::with_capacity(n + 1),
            left: Vec::with_capacity(n + 1),
            right: Vec::with_capacity(n + 1),
        };
        s.z.push(1);
        s.left.push(0);
        s.right.push(1);
        let mut left = 0u64;
        let mut right = 0u64;
        for _ in 0..n {
            let l = self.biased.sample(rng);
            let p = rng.random_range(1..=l);
            left = self.dist.sample_sum(left, rng).saturating_add(p - 1);
            right = self.dist.sample_sum(right, rng).saturating_add(l - p);
            s.lhat.push(l);
            s.pos.push(p);
            s.left.push(left);
            s.right.push(right.saturating_add(1));
            s.z.push(left.saturating_add(right).saturating_add(1));
        }
        s
    }
}

/// Samples a size-biased tree to depth `n` through its spine.
pub fn simulate_spine<R: Rng + ?Sized>(
    dist: &OffspringDistribution,
    n: usize,
    rng: &mut R,
) -> Result<SpineRealization> {
    Ok(SpineSampler::new(dist)?.sample(n, rng))
}

/// Generation sizes minus the spine, read as an immigration process with
/// `Y_k = L̂_k - 1`.
pub fn spine_as_immigration(spine: &SpineRealization) -> ImmigrationPath {
    ImmigrationPath {
        z: spine.z.iter().map(|&z| z - 1).collect(),
        y: spine.lhat.iter().map(|&l| l - 1).collect(),
        normalised: None,
        saturated_at: None,
        cap: u64::MAX,
    }
}
