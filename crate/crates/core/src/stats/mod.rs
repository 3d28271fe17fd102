//! Goodness-of-fit, growth classification and interval estimates.

mod ks;

pub use ks::{
    exponential_cdf, gamma2_cdf, ks_statistic, ks_two_sample, Cdf, Exponential, Gamma2,
};

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::Distribution;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// A sample of nonnegative reals.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    sorted: bool,
}

impl EmpiricalSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SampleTooSmall { got: 0, need: 1 });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "sample values must be finite and nonnegative, found {v}"
            )));
        }
        Ok(Self { values, sorted: false })
    }

    pub fn from_counts(counts: &[u64], scale: f64) -> Result<Self> {
        Self::new(counts.iter().map(|&c| c as f64 / scale).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn sort(&mut self) {
        if !self.sorted {
            self.values.sort_by(f64::total_cmp);
            self.sorted = true;
        }
    }

    pub fn into_sorted(mut self) -> Self {
        self.sort();
        self
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Median, averaging the two middle values for even counts.
    pub fn median(&self) -> f64 {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }
}

/// Nearest-rank quantile of `values` (need not be sorted).
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

/// `M` draws from the sample with probabilities proportional to the values.
pub fn size_biased_resample<R: Rng + ?Sized>(
    sample: &EmpiricalSample,
    rng: &mut R,
    m: usize,
) -> Result<EmpiricalSample> {
    let index = WeightedIndex::new(sample.values())
        .map_err(|_| Error::DegenerateSample("size-biasing needs a positive value".into()))?;
    EmpiricalSample::new((0..m).map(|_| sample.values[index.sample(rng)]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub statistic: String,
    pub value: f64,
    pub sample_size: usize,
    pub reference: String,
    pub threshold: f64,
    pub pass: bool,
}

/// Compares `U·X̂` with `X` by a two-sample KS statistic, where `X̂` is a
/// size-biased resample of the same size and `U` is uniform on [0, 1].
/// The two agree in law exactly when `X` is exponential. The threshold is
/// `2·1.63/√N`.
pub fn pakes_khattree_test<R: Rng + ?Sized>(
    sample: &EmpiricalSample,
    rng: &mut R,
) -> Result<GofReport> {
    let n = sample.count();
    if n < 10 {
        return Err(Error::SampleTooSmall { got: n, need: 10 });
    }
    if sample.mean() <= 0.0 {
        return Err(Error::DegenerateSample("sample mean is zero".into()));
    }
    let biased = size_biased_resample(sample, rng, n)?;
    let product = EmpiricalSample::new(
        biased
            .values()
            .iter()
            .map(|x| x * rng.random::<f64>())
            .collect(),
    )?;
    let value = ks_two_sample(&product, sample);
    let threshold = 2.0 * 1.63 / (n as f64).sqrt();
    Ok(GofReport {
        statistic: "two-sample KS of U*size-biased(X) against X".into(),
        value,
        sample_size: n,
        reference: "the input sample itself".into(),
        threshold,
        pass: value <= threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    SublinearLimsup,
    LinearExplosive,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub horizon: usize,
    /// 0.9-quantile over paths of `max_{h/2 <= n <= h} X_n/n` at `h = horizon`
    pub quantile_at_horizon: f64,
    /// the same at `h = 2·horizon`
    pub quantile_at_double: f64,
    pub ratio: f64,
    pub verdict: GrowthVerdict,
}

fn window_max(path: &[f64], h: usize) -> f64 {
    (h.div_ceil(2).max(1)..=h)
        .map(|n| path[n] / n as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Finite-horizon reading of `limsup X_n/n ∈ {0, ∞}`: the 0.9-quantile of
/// the windowed maximum of `X_n/n` either halves (sublinear) or doubles
/// (explosive) when the horizon doubles. Paths are indexed from `n = 0` and
/// must reach `2·horizon`.
pub fn classify_growth(paths: &[Vec<f64>], horizon: usize) -> Result<GrowthReport> {
    if horizon < 100 {
        return Err(Error::InvalidArgument(format!("horizon {horizon} below 100")));
    }
    if paths.len() < 100 {
        return Err(Error::SampleTooSmall { got: paths.len(), need: 100 });
    }
    if let Some(p) = paths.iter().find(|p| p.len() <= 2 * horizon) {
        return Err(Error::InvalidArgument(format!(
            "path of length {} does not reach generation {}",
            p.len(),
            2 * horizon
        )));
    }
    let at = |h: usize| {
        let maxima: Vec<f64> = paths.iter().map(|p| window_max(p, h)).collect();
        quantile(&maxima, 0.9)
    };
    let q1 = at(horizon);
    let q2 = at(2 * horizon);
    let ratio = q2 / q1;
    let verdict = if ratio <= 0.5 {
        GrowthVerdict::SublinearLimsup
    } else if ratio >= 2.0 {
        GrowthVerdict::LinearExplosive
    } else {
        GrowthVerdict::Inconclusive
    };
    Ok(GrowthReport {
        horizon,
        quantile_at_horizon: q1,
        quantile_at_double: q2,
        ratio,
        verdict,
    })
}

/// Normal-approximation interval `(mean, half-width)` at the given level.
pub fn mean_ci(sample: &[f64], level: f64) -> Result<(f64, f64)> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { got: n, need: 2 });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside (0, 1)")));
    }
    let mean = sample.iter().sum::<f64>() / n as f64;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    Ok((mean, z * (var / n as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand_distr::Exp;

    fn exp_sample(mean: f64, n: usize, seed: u64) -> EmpiricalSample {
        let mut rng = seeded(seed);
        let d = Exp::new(1.0 / mean).unwrap();
        EmpiricalSample::new((0..n).map(|_| d.sample(&mut rng)).collect()).unwrap()
    }

    #[test]
    fn resampling() {
        let mut rng = seeded(1);
        let c = EmpiricalSample::new(vec![3.0; 50]).unwrap();
        let r = size_biased_resample(&c, &mut rng, 1000).unwrap();
        assert!(r.values().iter().all(|&v| v == 3.0));
        let two = EmpiricalSample::new(vec![1.0, 3.0]).unwrap();
        let r = size_biased_resample(&two, &mut rng, 100_000).unwrap();
        let threes = r.values().iter().filter(|&&v| v == 3.0).count() as f64 / 1e5;
        assert!((threes - 0.75).abs() < 0.01);
        let zero = EmpiricalSample::new(vec![0.0; 5]).unwrap();
        assert!(size_biased_resample(&zero, &mut rng, 10).is_err());
    }

    #[test]
    fn resampled_exponential_is_gamma2() {
        let mut rng = seeded(2);
        let s = exp_sample(1.0, 100_000, 3);
        let r = size_biased_resample(&s, &mut rng, 100_000).unwrap();
        let ks = ks_statistic(&r, &gamma2_cdf(1.0).unwrap()).unwrap();
        assert!(ks <= 0.01, "{ks}");
    }

    #[test]
    fn pakes_khattree_examples() {
        let mut rng = seeded(4);
        let e = pakes_khattree_test(&exp_sample(0.5, 100_000, 5), &mut rng).unwrap();
        assert!(e.value <= 0.02 && e.pass);
        let u = EmpiricalSample::new((0..100_000).map(|_| rng.random::<f64>()).collect()).unwrap();
        let r = pakes_khattree_test(&u, &mut rng).unwrap();
        assert!(r.value >= 0.05 && !r.pass);
        let c = EmpiricalSample::new(vec![2.0; 1000]).unwrap();
        assert!(pakes_khattree_test(&c, &mut rng).unwrap().value >= 0.5);
        let z = EmpiricalSample::new(vec![0.0; 1000]).unwrap();
        assert!(pakes_khattree_test(&z, &mut rng).is_err());
    }

    #[test]
    fn growth_examples() {
        let ones: Vec<Vec<f64>> = (0..100).map(|_| vec![1.0; 401]).collect();
        assert_eq!(classify_growth(&ones, 200).unwrap().verdict, GrowthVerdict::SublinearLimsup);
        let squares: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..401).map(|n| (n * n) as f64).collect())
            .collect();
        assert_eq!(classify_growth(&squares, 200).unwrap().verdict, GrowthVerdict::LinearExplosive);
        let linear: Vec<Vec<f64>> = (0..100).map(|_| (0..401).map(|n| n as f64).collect()).collect();
        assert_eq!(classify_growth(&linear, 200).unwrap().verdict, GrowthVerdict::Inconclusive);
        assert!(classify_growth(&ones[..50], 200).is_err());
        assert!(classify_growth(&ones, 50).is_err());
        assert!(classify_growth(&ones, 300).is_err());
    }

    #[test]
    fn confidence_intervals() {
        let (m, h) = mean_ci(&[4.0; 10], 0.99).unwrap();
        assert_eq!((m, h), (4.0, 0.0));
        let n = 100_000;
        let two: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.0 } else { 2.0 }).collect();
        let (m, h) = mean_ci(&two, 0.99).unwrap();
        assert_eq!(m, 1.0);
        let want = 2.5758293035489 * (1.0 * n as f64 / (n - 1) as f64 / n as f64).sqrt();
        assert!((h - want).abs() < 1e-9);
        let e = exp_sample(1.0, n, 8);
        let (m, _) = mean_ci(e.values(), 0.99).unwrap();
        assert!((m - 1.0).abs() < 0.013);
        assert!(mean_ci(&[1.0], 0.9).is_err());
    }
}
