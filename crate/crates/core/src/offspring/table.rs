use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Probability masses on `{0, ..., len-1}` with suffix sums for inverse
/// transform draws. `survival[k] = P[L >= k]`; `survival[len]` is the mass
/// lying beyond the table (zero for genuinely finite laws).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MassTable {
    pmf: Vec<f64>,
    survival: Vec<f64>,
}

/// Draws at or below this count are made one at a time.
const INDIVIDUAL_DRAWS: u64 = 16;

impl MassTable {
    pub(crate) fn new(pmf: Vec<f64>, beyond: f64) -> Self {
        let mut survival = vec![0.0; pmf.len() + 1];
        survival[pmf.len()] = beyond;
        for k in (0..pmf.len()).rev() {
            survival[k] = survival[k + 1] + pmf[k];
        }
        Self { pmf, survival }
    }

    pub(crate) fn len(&self) -> usize {
        self.pmf.len()
    }

    pub(crate) fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub(crate) fn mass(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub(crate) fn beyond(&self) -> f64 {
        self.survival[self.pmf.len()]
    }

    /// Inverse-transform draw conditioned on `L >= k`, driven by `u` in [0, 1).
    /// `None` means the draw fell in the mass beyond the table.
    pub(crate) fn draw_at_least(&self, k: usize, u: f64) -> Option<u64> {
        let len = self.pmf.len();
        if k >= len {
            return None;
        }
        let t = u * self.survival[k];
        if t < self.survival[len] {
            return None;
        }
        let j = self.survival[k..len].partition_point(|&s| s > t);
        Some((k + j.max(1) - 1) as u64)
    }

    /// Sum of `n` independent draws.
    ///
    /// Classes are split off one at a time by conditional binomials (an exact
    /// multinomial split); once at most a handful of draws remain, they are
    /// drawn individually from the law conditioned on the classes not yet
    /// visited. `beyond` draws from the law conditioned on exceeding the table.
    pub(crate) fn sample_sum<R, F>(&self, n: u64, rng: &mut R, mut beyond: F) -> u64
    where
        R: Rng + ?Sized,
        F: FnMut(&mut R) -> u64,
    {
        let len = self.pmf.len();
        let mut remaining = n;
        let mut total: u64 = 0;
        let mut k = 0usize;
        while remaining > 0 {
            if remaining <= INDIVIDUAL_DRAWS || k >= len {
                for _ in 0..remaining {
                    let u: f64 = rng.random();
                    let v = match self.draw_at_least(k, u) {
                        Some(v) => v,
                        None => beyond(rng),
                    };
                    total = total.saturating_add(v);
                }
                break;
            }
            let sk = self.survival[k];
            if sk <= 0.0 {
                break;
            }
            let p = (self.pmf[k] / sk).clamp(0.0, 1.0);
            let c = binomial(rng, remaining, p);
            total = total.saturating_add(c.saturating_mul(k as u64));
            remaining -= c;
            k += 1;
        }
        total
    }
}

pub(crate) fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p)
            .expect("binomial parameters validated")
            .sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_respect_conditioning() {
        let t = MassTable::new(vec![0.25, 0.0, 0.5, 0.25], 0.0);
        assert_eq!(t.draw_at_least(0, 0.0), Some(3));
        assert_eq!(t.draw_at_least(0, 0.999), Some(0));
        assert_eq!(t.draw_at_least(1, 0.1), Some(3));
        assert_eq!(t.draw_at_least(1, 0.9), Some(2));
        // zero-mass class 1 is never returned
        for i in 0..1000 {
            let u = i as f64 / 1000.0;
            assert_ne!(t.draw_at_least(0, u), Some(1));
        }
    }

    #[test]
    fn beyond_mass_is_reported() {
        let t = MassTable::new(vec![0.5, 0.25], 0.25);
        assert_eq!(t.draw_at_least(0, 0.1), None);
        assert_eq!(t.draw_at_least(0, 0.3), Some(1));
        assert_eq!(t.draw_at_least(0, 0.9), Some(0));
    }
}
