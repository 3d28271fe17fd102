use crate::error::{Error, Result};

use super::EmpiricalSample;

/// A continuous reference distribution function.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma2 {
    pub scale: f64,
}

impl Cdf for Exponential {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x / self.mean).exp_m1()
        }
    }

    fn describe(&self) -> String {
        format!("exponential(mean {})", self.mean)
    }
}

impl Cdf for Gamma2 {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            let t = x / self.scale;
            1.0 - (-t).exp() * (1.0 + t)
        }
    }

    fn describe(&self) -> String {
        format!("gamma(shape 2, scale {})", self.scale)
    }
}

pub fn exponential_cdf(mean: f64) -> Result<Exponential> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponential mean must be > 0, got {mean}")));
    }
    Ok(Exponential { mean })
}

pub fn gamma2_cdf(scale: f64) -> Result<Gamma2> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma scale must be > 0, got {scale}")));
    }
    Ok(Gamma2 { scale })
}

/// One-sample Kolmogorov-Smirnov distance.
pub fn ks_statistic(sample: &EmpiricalSample, cdf: &dyn Cdf) -> Result<f64> {
    let n = sample.count();
    if n < 10 {
        return Err(Error::SampleTooSmall { got: n, need: 10 });
    }
    let mut v = sample.values().to_vec();
    if !sample.is_sorted() {
        v.sort_by(f64::total_cmp);
    }
    let nf = n as f64;
    Ok(v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf.cdf(x);
            let hi = (i + 1) as f64 / nf - f;
            let lo = f - i as f64 / nf;
            hi.abs().max(lo.abs())
        })
        .fold(0.0, f64::max))
}

/// Two-sample Kolmogorov-Smirnov distance between empirical distribution
/// functions.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> f64 {
    let mut x = a.values().to_vec();
    let mut y = b.values().to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / nx - j as f64 / ny).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;
    use rand_distr::{Distribution, Exp};

    #[test]
    fn cdf_values() {
        let e = exponential_cdf(1.0).unwrap();
        assert_eq!(e.cdf(0.0), 0.0);
        assert_eq!(e.cdf(f64::INFINITY), 1.0);
        assert!((e.cdf(1.0) - 0.632_120_558_828_557_7).abs() < 1e-15);
        let g = gamma2_cdf(1.0).unwrap();
        assert!((g.cdf(1.0) - (1.0 - 2.0 / std::f64::consts::E)).abs() < 1e-15);
        assert!(exponential_cdf(0.0).is_err());
        assert!(gamma2_cdf(-1.0).is_err());
    }

    #[test]
    fn ks_examples() {
        let mut rng = seeded(0);
        let d = Exp::new(1.0).unwrap();
        let s = EmpiricalSample::new((0..100_000).map(|_| d.sample(&mut rng)).collect()).unwrap();
        assert!(ks_statistic(&s, &exponential_cdf(1.0).unwrap()).unwrap() <= 0.0065);
        let zeros = EmpiricalSample::new(vec![0.0; 20]).unwrap();
        assert_eq!(ks_statistic(&zeros, &exponential_cdf(1.0).unwrap()).unwrap(), 1.0);
        let u = EmpiricalSample::new((0..10_000).map(|_| rng.random::<f64>()).collect()).unwrap();
        assert!(ks_statistic(&u, &exponential_cdf(0.5).unwrap()).unwrap() > 0.1);
        let few = EmpiricalSample::new(vec![1.0; 5]).unwrap();
        assert!(ks_statistic(&few, &exponential_cdf(1.0).unwrap()).is_err());
    }

    #[test]
    fn two_sample_distance() {
        let a = EmpiricalSample::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        let b = EmpiricalSample::new(vec![5.0, 6.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &b), 1.0);
        let c = EmpiricalSample::new(vec![2.5, 2.5]).unwrap();
        assert_eq!(ks_two_sample(&a, &c), 0.5);
    }
}
