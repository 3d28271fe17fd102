use rand::Rng;

use super::heavy::{TailSampler, TailShape};
use super::{sample_geometric, MassTable, Mass, OffspringDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Biased {
    Table(MassTable),
    /// `1 + G₁ + G₂` with `G_i` geometric(p)
    Geometric { p: f64 },
    Heavy { head: MassTable, tail: Option<TailSampler> },
}

/// The law `k·p_k/m` on `{1, 2, ...}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeBiasedDistribution {
    base: OffspringDistribution,
    biased: Biased,
    mean: f64,
}

impl SizeBiasedDistribution {
    pub(crate) fn new(base: &OffspringDistribution) -> Result<Self> {
        let m = base.mean();
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidLaw(format!(
                "size-biasing needs 0 < m < inf, got m = {m}"
            )));
        }
        let (biased, second_moment) = match &base.mass {
            Mass::Table(t) => {
                let pmf: Vec<f64> = t
                    .pmf()
                    .iter()
                    .enumerate()
                    .map(|(k, p)| k as f64 * p / m)
                    .collect();
                let second: f64 = t
                    .pmf()
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (k * k) as f64 * p)
                    .sum();
                (Biased::Table(MassTable::new(pmf, 0.0)), second)
            }
            Mass::Geometric { p } => {
                let q = 1.0 - p;
                (Biased::Geometric { p: *p }, q / (p * p) + m * m)
            }
            Mass::Heavy(h) => {
                let pmf: Vec<f64> = h
                    .head
                    .pmf()
                    .iter()
                    .enumerate()
                    .map(|(k, p)| k as f64 * p / m)
                    .collect();
                let head_second: f64 = h
                    .head
                    .pmf()
                    .iter()
                    .enumerate()
                    .rev()
                    .map(|(k, p)| (k * k) as f64 * p)
                    .sum();
                let tail = h
                    .tail
                    .as_ref()
                    .map(|_| TailSampler::new(h.head_end + 1, h.cutoff, TailShape::SizeBiased));
                let beyond = h.tail_first_moment() / m;
                let second = head_second + h.tail_second_moment();
                (
                    Biased::Heavy {
                        head: MassTable::new(pmf, beyond),
                        tail,
                    },
                    second,
                )
            }
        };
        Ok(Self {
            base: base.clone(),
            biased,
            mean: second_moment / m,
        })
    }

    pub fn base(&self) -> &OffspringDistribution {
        &self.base
    }

    /// `P[L̂ = k] = k·p_k/m`.
    pub fn pmf(&self, k: u64) -> f64 {
        k as f64 * self.base.pmf(k) / self.base.mean()
    }

    /// `E[L̂] = E[L²]/m`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.biased {
            Biased::Table(t) => {
                let u: f64 = rng.random();
                t.draw_at_least(0, u).unwrap_or(t.len() as u64 - 1).max(1)
            }
            Biased::Geometric { p } => 1 + sample_geometric(*p, rng) + sample_geometric(*p, rng),
            Biased::Heavy { head, tail } => {
                let u: f64 = rng.random();
                match head.draw_at_least(0, u) {
                    Some(k) => k.max(1),
                    None => tail
                        .as_ref()
                        .expect("tail mass implies a tail sampler")
                        .sample(rng),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn examples() {
        let d = OffspringDistribution::finite(&[0.5, 0.0, 0.5]).unwrap();
        let sb = d.size_biased().unwrap();
        assert_eq!(sb.pmf(2), 1.0);
        assert_eq!(sb.pmf(0), 0.0);
        let d = OffspringDistribution::finite(&[0.25, 0.0, 0.75]).unwrap();
        let sb = d.size_biased().unwrap();
        assert!((sb.pmf(2) - 1.0).abs() < 1e-15);
        let d = OffspringDistribution::finite(&[0.0, 1.0]).unwrap();
        let sb = d.size_biased().unwrap();
        let mut rng = seeded(0);
        assert!((0..100).all(|_| sb.sample(&mut rng) == 1));
        assert!(OffspringDistribution::finite(&[1.0]).unwrap().size_biased().is_err());
    }

    #[test]
    fn mean_matches_moment_formula() {
        let d = OffspringDistribution::finite(&[0.2, 0.3, 0.1, 0.4]).unwrap();
        let sb = d.size_biased().unwrap();
        let v = d.variance().finite().unwrap();
        let m = d.mean();
        assert!((sb.mean() - (v + m * m) / m).abs() < 1e-12);
        let g = OffspringDistribution::geometric(0.4).unwrap();
        let sb = g.size_biased().unwrap();
        let v = g.variance().finite().unwrap();
        let m = g.mean();
        assert!((sb.mean() - (v + m * m) / m).abs() < 1e-12);
    }

    #[test]
    fn geometric_size_bias_sampling() {
        let g = OffspringDistribution::geometric(0.5).unwrap();
        let sb = g.size_biased().unwrap();
        let mut rng = seeded(7);
        let n = 200_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let k = sb.sample(&mut rng) as usize;
            assert!(k >= 1);
            if k < 4 {
                counts[k] += 1;
            }
        }
        for k in 1..4u64 {
            let p = sb.pmf(k);
            let got = counts[k as usize] as f64 / n as f64;
            assert!((got - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "k={k}");
        }
    }

    #[test]
    fn heavy_size_bias_tail_frequency() {
        let d = OffspringDistribution::heavy_tail_with_atom(0.5, 0, 1 << 40).unwrap();
        let sb = d.size_biased().unwrap();
        let h = d.heavy().unwrap();
        let p_tail = h.tail_first_moment() / d.mean();
        let mut rng = seeded(11);
        let n = 100_000;
        let tail = (0..n)
            .filter(|_| sb.sample(&mut rng) > h.head_end)
            .count();
        let got = tail as f64 / n as f64;
        assert!((got - p_tail).abs() < 4.0 * (p_tail * (1.0 - p_tail) / n as f64).sqrt());
    }
}
