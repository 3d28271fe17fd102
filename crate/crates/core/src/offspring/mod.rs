//! Offspring laws: construction, exact moments, sampling and size-biasing.

mod heavy;
mod size_biased;
mod table;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use heavy::{one_minus_pow, HeavyTail};
pub(crate) use table::MassTable;

pub use size_biased::SizeBiasedDistribution;

/// A moment that is either a finite number or flagged divergent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Moment {
    Finite(f64),
    #[serde(with = "infinite_marker")]
    Infinite,
}

mod infinite_marker {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("infinite")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "infinite" {
            Ok(())
        } else {
            Err(serde::de::Error::custom("expected \"infinite\""))
        }
    }
}

impl Moment {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(*v),
            Moment::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Moment::Infinite)
    }
}

impl std::fmt::Display for Moment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Moment::Finite(v) => write!(f, "{v}"),
            Moment::Infinite => write!(f, "infinite"),
        }
    }
}

/// Mean, variance and `E[L log⁺ L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: Moment,
    pub llogl: Moment,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    FiniteSupport,
    /// `P[L = k] = p (1-p)^k`, `k >= 0`
    Geometric { p: f64 },
    /// Poisson masses on `0..=cutoff`, renormalised
    TruncatedPoisson { rate: f64, cutoff: u64 },
    /// `α·δ_atom + (1-α)·c/(k² ln² k)` on `2..=cutoff`
    HeavyTail { alpha: f64, atom: u64, cutoff: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Mass {
    Table(MassTable),
    Geometric { p: f64 },
    Heavy(Box<HeavyTail>),
}

/// An offspring law `p_k`. Immutable; moments are computed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringDistribution {
    family: Family,
    pub(crate) mass: Mass,
    moments: Moments,
    untruncated_mean_bound: Option<f64>,
}

const PMF_SUM_TOLERANCE: f64 = 1e-12;

impl OffspringDistribution {
    /// Law with the given masses on `0, 1, ..., len-1`, normalised to sum 1.
    pub fn finite(masses: &[f64]) -> Result<Self> {
        let pmf = normalize(masses)?;
        Ok(Self::from_table(Family::FiniteSupport, pmf))
    }

    /// Point mass at `k`.
    pub fn point_mass(k: usize) -> Self {
        let mut pmf = vec![0.0; k + 1];
        pmf[k] = 1.0;
        Self::from_table(Family::FiniteSupport, pmf)
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidLaw(format!(
                "geometric success probability must lie in (0, 1], got {p}"
            )));
        }
        let q = 1.0 - p;
        let mean = q / p;
        let variance = q / (p * p);
        // E[L ln L] by direct summation of the series
        let mut llogl = 0.0;
        let mut term_mass = p * q; // P[L = 1]
        let mut k = 1u64;
        while k < 100_000_000 {
            k += 1;
            term_mass *= q;
            let term = k as f64 * (k as f64).ln() * term_mass;
            llogl += term;
            if term_mass == 0.0 || (k as f64 > mean && term < 1e-18 * llogl.max(1e-300)) {
                break;
            }
        }
        Ok(Self {
            family: Family::Geometric { p },
            mass: Mass::Geometric { p },
            moments: Moments {
                mean,
                variance: Moment::Finite(variance),
                llogl: Moment::Finite(llogl),
            },
            untruncated_mean_bound: None,
        })
    }

    pub fn truncated_poisson(rate: f64, cutoff: u64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidLaw(format!("poisson rate must be finite and >= 0, got {rate}")));
        }
        if cutoff > 1 << 24 {
            return Err(Error::InvalidLaw(format!("poisson cutoff {cutoff} too large")));
        }
        let log_masses: Vec<f64> = (0..=cutoff)
            .scan(0.0f64, |log_fact, k| {
                if k > 0 {
                    *log_fact += (k as f64).ln();
                }
                let lm = if rate == 0.0 {
                    if k == 0 { 0.0 } else { f64::NEG_INFINITY }
                } else {
                    k as f64 * rate.ln() - *log_fact
                };
                Some(lm)
            })
            .collect();
        let top = log_masses.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = log_masses.iter().map(|l| (l - top).exp()).collect();
        let pmf = normalize(&raw)?;
        Ok(Self::from_table(Family::TruncatedPoisson { rate, cutoff }, pmf))
    }

    /// The heavy-tailed mixture `α·δ₂ + (1-α)·c/(k² ln² k)` on `2..=cutoff`.
    pub fn heavy_tail(alpha: f64, cutoff: u64) -> Result<Self> {
        Self::heavy_tail_with_atom(alpha, 2, cutoff)
    }

    /// Heavy-tailed mixture with the point mass placed at `atom` (at most 16).
    /// An atom at 0 gives subcritical or mildly supercritical laws.
    pub fn heavy_tail_with_atom(alpha: f64, atom: u64, cutoff: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidLaw(format!("mixture weight must lie in [0, 1], got {alpha}")));
        }
        if cutoff < 10 {
            return Err(Error::InvalidLaw(format!("heavy-tail cutoff must be >= 10, got {cutoff}")));
        }
        if cutoff > 1 << 62 {
            return Err(Error::InvalidLaw(format!("heavy-tail cutoff {cutoff} exceeds 2^62")));
        }
        if atom > 16 {
            return Err(Error::InvalidLaw(format!("heavy-tail atom must be <= 16, got {atom}")));
        }
        let h = HeavyTail::new(alpha, atom, cutoff);
        let mean = h.mean();
        let bound = h.untruncated_mean_bound();
        // The untruncated tail component has Σ k² p_k = ∞ and Σ k ln k p_k = ∞.
        let (variance, llogl) = if alpha < 1.0 {
            (Moment::Infinite, Moment::Infinite)
        } else {
            let a = atom as f64;
            let ll = if atom > 1 { a * a.ln() } else { 0.0 };
            (Moment::Finite(0.0), Moment::Finite(ll))
        };
        Ok(Self {
            family: Family::HeavyTail { alpha, atom, cutoff },
            mass: Mass::Heavy(Box::new(h)),
            moments: Moments { mean, variance, llogl },
            untruncated_mean_bound: Some(bound),
        })
    }

    fn from_table(family: Family, mut pmf: Vec<f64>) -> Self {
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let variance: f64 = pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - mean).powi(2) * p)
            .sum();
        let llogl: f64 = pmf
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, p)| k as f64 * (k as f64).ln() * p)
            .sum();
        Self {
            family,
            mass: Mass::Table(MassTable::new(pmf, 0.0)),
            moments: Moments {
                mean,
                variance: Moment::Finite(variance),
                llogl: Moment::Finite(llogl),
            },
            untruncated_mean_bound: None,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn moments(&self) -> Moments {
        self.moments
    }

    pub fn mean(&self) -> f64 {
        self.moments.mean
    }

    pub fn variance(&self) -> Moment {
        self.moments.variance
    }

    pub fn llogl(&self) -> Moment {
        self.moments.llogl
    }

    /// For heavy-tailed laws, an upper bound on the mean of the family without
    /// its cutoff.
    pub fn untruncated_mean_bound(&self) -> Option<f64> {
        self.untruncated_mean_bound
    }

    /// `P[L = k]`.
    pub fn pmf(&self, k: u64) -> f64 {
        match &self.mass {
            Mass::Table(t) => t.mass(k as usize),
            Mass::Geometric { p } => p * (1.0 - p).powf(k as f64),
            Mass::Heavy(h) => h.pmf(k),
        }
    }

    /// Largest value with positive mass; `None` for unbounded support.
    pub fn max_support(&self) -> Option<u64> {
        match &self.mass {
            Mass::Table(t) => Some(t.len() as u64 - 1),
            Mass::Geometric { p } => (*p >= 1.0).then_some(0),
            Mass::Heavy(h) => Some(if h.alpha >= 1.0 { h.atom } else { h.cutoff }),
        }
    }

    /// Masses on `0..=max_support` when the support is tabulated in full.
    pub fn dense_pmf(&self) -> Option<&[f64]> {
        match &self.mass {
            Mass::Table(t) => Some(t.pmf()),
            Mass::Heavy(h) if h.tail.is_none() => Some(h.head.pmf()),
            _ => None,
        }
    }

    /// `f(s) = Σ p_k s^k` for `s` in [0, 1].
    pub(crate) fn pgf(&self, s: f64) -> f64 {
        match &self.mass {
            Mass::Table(t) => t.pmf().iter().rev().fold(0.0, |acc, p| acc * s + p),
            Mass::Geometric { p } => p / (1.0 - (1.0 - p) * s),
            Mass::Heavy(h) => 1.0 - h.pgf_complement(1.0 - s),
        }
    }

    /// `1 - f(1 - σ)`, evaluated without cancellation for small `σ`.
    pub(crate) fn pgf_complement(&self, sigma: f64) -> f64 {
        match &self.mass {
            Mass::Table(t) => {
                let l = (-sigma).ln_1p();
                t.pmf()
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .map(|(k, p)| p * one_minus_pow(l, k as f64))
                    .sum()
            }
            Mass::Geometric { p } => {
                let q = 1.0 - p;
                q * sigma / (p + q * sigma)
            }
            Mass::Heavy(h) => h.pgf_complement(sigma),
        }
    }

    /// One draw: inverse transform for tabulated laws, closed-form inversion
    /// for the geometric law, rejection in the far tail of heavy-tailed laws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.mass {
            Mass::Table(t) => {
                let u: f64 = rng.random();
                t.draw_at_least(0, u).unwrap_or(t.len() as u64 - 1)
            }
            Mass::Geometric { p } => sample_geometric(*p, rng),
            Mass::Heavy(h) => h.sample(rng),
        }
    }

    /// Sum of `n` independent draws (total offspring of `n` particles).
    pub fn sample_sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> u64 {
        match &self.mass {
            Mass::Table(t) => t.sample_sum(n, rng, |_| t.len() as u64 - 1),
            Mass::Geometric { p } => {
                if n <= 16 || *p >= 1.0 {
                    (0..n).map(|_| sample_geometric(*p, rng)).sum()
                } else {
                    negative_binomial(n, *p, rng)
                }
            }
            Mass::Heavy(h) => h.sample_sum(n, rng),
        }
    }

    pub fn size_biased(&self) -> Result<SizeBiasedDistribution> {
        SizeBiasedDistribution::new(self)
    }

    #[cfg(test)]
    pub(crate) fn heavy(&self) -> Option<&HeavyTail> {
        match &self.mass {
            Mass::Heavy(h) => Some(h),
            _ => None,
        }
    }

    pub(crate) fn geometric_p(&self) -> Option<f64> {
        match &self.mass {
            Mass::Geometric { p } => Some(*p),
            _ => None,
        }
    }

    /// Short human-readable description used in reports.
    pub fn describe(&self) -> String {
        match &self.family {
            Family::FiniteSupport => {
                let pmf = self.dense_pmf().unwrap_or(&[]);
                let shown: Vec<String> = pmf.iter().map(|p| format!("{p}")).collect();
                format!("finite[{}]", shown.join(","))
            }
            Family::Geometric { p } => format!("geometric(p={p})"),
            Family::TruncatedPoisson { rate, cutoff } => {
                format!("truncated-poisson(rate={rate},cutoff={cutoff})")
            }
            Family::HeavyTail { alpha, atom, cutoff } => {
                format!("heavy-tail(alpha={alpha},atom={atom},cutoff={cutoff})")
            }
        }
    }
}

fn normalize(masses: &[f64]) -> Result<Vec<f64>> {
    if masses.is_empty() {
        return Err(Error::InvalidLaw("empty mass array".into()));
    }
    if let Some((k, p)) = masses.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidLaw(format!("mass at {k} is {p}; masses must be finite and >= 0")));
    }
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidLaw("all masses are zero".into()));
    }
    let pmf: Vec<f64> = masses.iter().map(|p| p / total).collect();
    debug_assert!((pmf.iter().sum::<f64>() - 1.0).abs() < PMF_SUM_TOLERANCE);
    Ok(pmf)
}

pub(crate) fn sample_geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    // U in (0, 1]
    let u: f64 = 1.0 - rng.random::<f64>();
    (u.ln() / (1.0 - p).ln()).floor() as u64
}

/// Sum of `n` geometric(p) variables through the gamma-Poisson mixture.
fn negative_binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    let lambda = Gamma::new(n as f64, (1.0 - p) / p)
        .expect("valid gamma parameters")
        .sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).map(|d| d.sample(rng) as u64).unwrap_or(u64::MAX)
}
