//! The heavy-tailed mixture `α·δ_atom + (1-α)·c·w(k)`, `w(k) = 1/(k² ln² k)`
//! on `2 <= k <= K`.
//!
//! `Σ k w(k)` converges while `Σ k ln k · w(k)` diverges, so the untruncated
//! family has a finite mean and infinite `E[L log L]`. Masses up to
//! `HEAD_LEN` are tabulated; the rest of the range up to the cutoff is handled
//! analytically (Euler-Maclaurin sums and rejection sampling), which lets the
//! cutoff go as high as `2^62`.

use rand::Rng;

use super::table::MassTable;
use crate::numerics::euler_maclaurin_sum;

pub(crate) const HEAD_LEN: u64 = 1 << 16;

pub(crate) fn weight(x: f64) -> f64 {
    let l = x.ln();
    1.0 / (x * x * l * l)
}

fn weight_deriv(x: f64) -> f64 {
    let l = x.ln();
    -2.0 * (l + 1.0) / (x * x * x * l * l * l)
}

/// `Σ_{k=a}^{b} g(k)·w(k)` for the tail range, with `g` and `g'` supplied.
pub(crate) fn tail_sum(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    a: u64,
    b: u64,
) -> f64 {
    euler_maclaurin_sum(
        |x| g(x) * weight(x),
        |x| dg(x) * weight(x) + g(x) * weight_deriv(x),
        a,
        b,
    )
}

/// Which weight a tail draw is proportional to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum TailShape {
    /// `w(k)`
    Plain,
    /// `k·w(k)`, the size-biased tail
    SizeBiased,
}

/// Exact rejection sampler for the tail on `a..=b` (`a > HEAD_LEN`).
///
/// The proposal is the integer part of a continuous variable whose survival
/// function is proportional to `1/(x ln² x)` (plain) or `1/ln x`
/// (size-biased); both have closed-form cell masses and dominate the target.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TailSampler {
    a: u64,
    b: u64,
    shape: TailShape,
    g_lo: f64,
    g_hi: f64,
    bound: f64,
}

impl TailSampler {
    pub(crate) fn new(a: u64, b: u64, shape: TailShape) -> Self {
        let g = |x: f64| match shape {
            TailShape::Plain => 1.0 / (x * x.ln().powi(2)),
            TailShape::SizeBiased => 1.0 / x.ln(),
        };
        let mut s = Self {
            a,
            b,
            shape,
            g_lo: g(a as f64),
            g_hi: g(b as f64 + 1.0),
            bound: 1.0,
        };
        if shape == TailShape::SizeBiased {
            s.bound = s.ratio(a);
        }
        s
    }

    /// target(k) / proposal cell mass(k), up to the shared normalisation.
    fn ratio(&self, k: u64) -> f64 {
        let kf = k as f64;
        let l0 = kf.ln();
        let d = (1.0 / kf).ln_1p();
        let l1 = l0 + d;
        match self.shape {
            TailShape::Plain => {
                let num = l1 * l1 + kf * d * (l1 + l0);
                (kf + 1.0) * l1 * l1 / (kf * num)
            }
            TailShape::SizeBiased => l1 / (kf * l0 * d),
        }
    }

    fn invert(&self, target: f64) -> f64 {
        match self.shape {
            TailShape::SizeBiased => (1.0 / target).exp(),
            TailShape::Plain => {
                // solve y + 2 ln y = -ln target for y = ln x
                let rhs = -target.ln();
                let mut y = rhs.max((self.a as f64).ln());
                for _ in 0..60 {
                    let f = y + 2.0 * y.ln() - rhs;
                    let step = f / (1.0 + 2.0 / y);
                    y -= step;
                    if step.abs() < 1e-15 * y {
                        break;
                    }
                }
                y.exp()
            }
        }
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        loop {
            let v: f64 = rng.random();
            let target = self.g_hi + v * (self.g_lo - self.g_hi);
            let x = self.invert(target);
            let k = if x.is_finite() { x.floor() as u64 } else { self.b };
            let k = k.clamp(self.a, self.b);
            let accept = self.ratio(k) / self.bound;
            debug_assert!(accept <= 1.0 + 1e-9, "rejection bound violated: {accept}");
            if rng.random::<f64>() < accept {
                return k;
            }
        }
    }
}

/// Tabulated head plus analytic tail of the mixture.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct HeavyTail {
    pub(crate) alpha: f64,
    pub(crate) atom: u64,
    pub(crate) cutoff: u64,
    /// normaliser `c` of the tail component
    pub(crate) norm: f64,
    pub(crate) head: MassTable,
    pub(crate) tail: Option<TailSampler>,
    /// largest tabulated index
    pub(crate) head_end: u64,
}

impl HeavyTail {
    pub(crate) fn new(alpha: f64, atom: u64, cutoff: u64) -> Self {
        let head_end = cutoff.min(HEAD_LEN);
        let head_weights: Vec<f64> = (0..=head_end)
            .map(|k| if k < 2 { 0.0 } else { weight(k as f64) })
            .collect();
        // sum small terms first
        let head_sum: f64 = head_weights.iter().rev().sum();
        let tail_w = if cutoff > head_end {
            tail_sum(|_| 1.0, |_| 0.0, head_end + 1, cutoff)
        } else {
            0.0
        };
        let norm = 1.0 / (head_sum + tail_w);
        let mut pmf: Vec<f64> = head_weights
            .iter()
            .map(|w| (1.0 - alpha) * norm * w)
            .collect();
        pmf[atom as usize] += alpha;
        let beyond = (1.0 - alpha) * norm * tail_w;
        let tail = (cutoff > head_end).then(|| TailSampler::new(head_end + 1, cutoff, TailShape::Plain));
        Self {
            alpha,
            atom,
            cutoff,
            norm,
            head: MassTable::new(pmf, beyond),
            tail,
            head_end,
        }
    }

    pub(crate) fn pmf(&self, k: u64) -> f64 {
        if k <= self.head_end {
            self.head.mass(k as usize)
        } else if k <= self.cutoff {
            (1.0 - self.alpha) * self.norm * weight(k as f64)
        } else {
            0.0
        }
    }

    fn tail_moment(&self, g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64) -> f64 {
        if self.cutoff > self.head_end {
            (1.0 - self.alpha) * self.norm * tail_sum(g, dg, self.head_end + 1, self.cutoff)
        } else {
            0.0
        }
    }

    pub(crate) fn mean(&self) -> f64 {
        let head: f64 = self
            .head
            .pmf()
            .iter()
            .enumerate()
            .rev()
            .map(|(k, p)| k as f64 * p)
            .sum();
        head + self.tail_moment(|x| x, |_| 1.0)
    }

    /// Mean of the tail component over `(head_end, cutoff]`, i.e. `Σ k p_k`.
    pub(crate) fn tail_first_moment(&self) -> f64 {
        self.tail_moment(|x| x, |_| 1.0)
    }

    pub(crate) fn tail_second_moment(&self) -> f64 {
        self.tail_moment(|x| x * x, |x| 2.0 * x)
    }

    /// Upper bound on the mean of the family with the cutoff removed.
    pub(crate) fn untruncated_mean_bound(&self) -> f64 {
        // Σ_{k>K} 1/(k ln² k) <= 1/ln K, and removing the cutoff can only
        // shrink the normaliser.
        self.mean() + (1.0 - self.alpha) * self.norm / (self.cutoff as f64).ln()
    }

    /// `1 - f(1 - sigma)`.
    pub(crate) fn pgf_complement(&self, sigma: f64) -> f64 {
        let l = (-sigma).ln_1p();
        let head: f64 = self
            .head
            .pmf()
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .map(|(k, p)| p * one_minus_pow(l, k as f64))
            .sum();
        if l == f64::NEG_INFINITY {
            return head + self.head.beyond();
        }
        head + self.tail_moment(
            |x| one_minus_pow(l, x),
            |x| -l * (x * l).exp(),
        )
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        match self.head.draw_at_least(0, u) {
            Some(k) => k,
            None => self.sample_tail(rng),
        }
    }

    pub(crate) fn sample_tail<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.tail
            .as_ref()
            .expect("tail mass implies a tail sampler")
            .sample(rng)
    }

    pub(crate) fn sample_sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> u64 {
        self.head.sample_sum(n, rng, |r| self.sample_tail(r))
    }
}

/// `1 - (1-σ)^x` from `l = ln(1-σ)`.
pub(crate) fn one_minus_pow(l: f64, x: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        1.0
    } else {
        -(x * l).exp_m1()
    }
}
