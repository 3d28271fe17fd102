//! Exact numerics on probability generating functions.

mod series;

pub use series::{
    conditioned_law, size_bias_law, stochastically_dominates, tv_distance, zn_law,
    zn_law_captured, zn_laws, TruncatedLaw, DEFAULT_K, MAX_K,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;

const EXTINCTION_TOLERANCE: f64 = 1e-14;
const EXTINCTION_MAX_ITERATIONS: u64 = 10_000_000;
const LINEAR: f64 = 1e-280;

/// `f(s) = Σ p_k s^k`.
pub fn pgf_eval(dist: &OffspringDistribution, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("pgf argument {s} outside [0, 1]")));
    }
    Ok(dist.pgf(s))
}

/// Extinction probability `q`, the limit of `f^{∘j}(0)`.
///
/// Returns 1 without iterating when `m <= 1` and `p_1 < 1`; returns 0 for the
/// point mass at 1.
pub fn extinction_prob(dist: &OffspringDistribution) -> Result<f64> {
    if dist.pmf(1) >= 1.0 {
        return Ok(0.0);
    }
    if dist.mean() <= 1.0 {
        return Ok(1.0);
    }
    let mut q = 0.0;
    for _ in 0..EXTINCTION_MAX_ITERATIONS {
        let next = dist.pgf(q);
        if (next - q).abs() < EXTINCTION_TOLERANCE {
            return Ok(next);
        }
        q = next;
    }
    Err(Error::NonConvergence {
        iterations: EXTINCTION_MAX_ITERATIONS,
        last: q,
    })
}

/// `s[n] = P[Z_n > 0]` for `n = 0..=N` and the normalised `s[n]/m^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalSequence {
    pub s: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl SurvivalSequence {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `n·s[n]`, the quantity that converges to `2/σ²` for critical laws.
    pub fn kolmogorov(&self, n: usize) -> f64 {
        n as f64 * self.s[n]
    }

    /// Largest increase `ratios[n] - ratios[n-1]` (`<= 0` when nonincreasing).
    pub fn max_ratio_increase(&self) -> f64 {
        self.ratios
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Survival probabilities through `σ_{n+1} = 1 - f(1 - σ_n)`, iterated on the
/// complement so that `σ_n` keeps full relative precision as it goes to 0.
pub fn survival_seq(dist: &OffspringDistribution, n: usize) -> Result<SurvivalSequence> {
    if n < 1 {
        return Err(Error::InvalidArgument("survival sequence needs N >= 1".into()));
    }
    let m = dist.mean();
    let mut s = Vec::with_capacity(n + 1);
    let mut ratios = Vec::with_capacity(n + 1);
    let mut sigma = 1.0;
    let mut ratio = 1.0;
    s.push(sigma);
    ratios.push(ratio);
    for _ in 0..n {
        // below LINEAR the step factor σ_{n+1}/σ_n equals f'(1) = m to double
        // precision; dividing subnormals would lose every digit
        let factor = if sigma > LINEAR {
            let next = dist.pgf_complement(sigma).clamp(0.0, 1.0);
            let factor = next / sigma;
            sigma = next;
            factor
        } else {
            sigma *= m;
            m
        };
        ratio = if m > 0.0 { ratio * factor / m } else { 0.0 };
        s.push(sigma);
        ratios.push(ratio);
    }
    Ok(SurvivalSequence { s, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(p: &[f64]) -> OffspringDistribution {
        OffspringDistribution::finite(p).unwrap()
    }

    #[test]
    fn pgf_examples() {
        let d = law(&[0.5, 0.0, 0.5]);
        assert_eq!(pgf_eval(&d, 1.0).unwrap(), 1.0);
        assert!((pgf_eval(&d, 0.5).unwrap() - 0.625).abs() < 1e-15);
        let g = OffspringDistribution::geometric(0.5).unwrap();
        assert!((pgf_eval(&g, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(pgf_eval(&d, 1.5).is_err());
        assert!(pgf_eval(&d, -0.1).is_err());
    }

    #[test]
    fn extinction_examples() {
        assert!((extinction_prob(&law(&[0.25, 0.0, 0.75])).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(extinction_prob(&law(&[0.5, 0.0, 0.5])).unwrap(), 1.0);
        assert_eq!(extinction_prob(&law(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(extinction_prob(&law(&[0.0, 0.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn heavy_pgf_agrees_with_complement() {
        let d = OffspringDistribution::heavy_tail(0.3, 1 << 40).unwrap();
        for &s in &[0.0, 0.2, 0.7, 0.99] {
            let a = d.pgf(s);
            let b = 1.0 - d.pgf_complement(1.0 - s);
            assert!((a - b).abs() < 1e-14);
        }
        assert!((d.pgf(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn survival_examples() {
        let g = OffspringDistribution::geometric(0.5).unwrap();
        let seq = survival_seq(&g, 1000).unwrap();
        for (n, s) in seq.s.iter().enumerate() {
            assert!((s * (n as f64 + 1.0) - 1.0).abs() < 1e-9);
        }
        let line = survival_seq(&law(&[0.0, 1.0]), 50).unwrap();
        assert!(line.s.iter().all(|&s| s == 1.0));
        assert!(survival_seq(&line_law(), 0).is_err());
    }

    fn line_law() -> OffspringDistribution {
        law(&[0.0, 1.0])
    }

    #[test]
    fn survival_matches_plain_iteration_at_moderate_n() {
        let d = law(&[0.25, 0.25, 0.5]);
        let seq = survival_seq(&d, 30).unwrap();
        let mut q = 0.0;
        for n in 1..=30 {
            q = d.pgf(q);
            assert!((seq.s[n] - (1.0 - q)).abs() < 1e-13);
        }
    }
}
