//! Laws of `Z_n` by truncated power-series composition.

use std::io::Write;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;

pub const DEFAULT_K: usize = 4096;
pub const MAX_K: usize = 1 << 20;
const MAX_SUPPORT: u64 = 4096;
const CAPTURED_TAIL: f64 = 1e-9;
/// Products up to this length are formed directly. Direct products of
/// nonnegative series keep full relative precision in every coefficient, which
/// matters for survival masses far below machine epsilon.
const NAIVE_LIMIT: usize = DEFAULT_K + 1;

/// Masses on `{0..K}` plus the mass beyond `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedLaw {
    pub masses: Vec<f64>,
    pub tail: f64,
    pub generation: u32,
    pub provenance: String,
    /// set when more than half of the mass fell beyond `K`
    pub insufficient_support: bool,
}

impl TruncatedLaw {
    pub fn new(masses: Vec<f64>, tail: f64, generation: u32, provenance: impl Into<String>) -> Self {
        Self {
            masses,
            tail,
            generation,
            provenance: provenance.into(),
            insufficient_support: tail > 0.5,
        }
    }

    /// Law of an empirical sample of nonnegative integers, with values above
    /// `k` counted as tail.
    pub fn from_counts(values: impl IntoIterator<Item = u64>, k: usize, provenance: &str) -> Self {
        let mut counts = vec![0u64; k + 1];
        let mut beyond = 0u64;
        let mut total = 0u64;
        for v in values {
            total += 1;
            if (v as usize) <= k && v <= k as u64 {
                counts[v as usize] += 1;
            } else {
                beyond += 1;
            }
        }
        let t = total.max(1) as f64;
        Self::new(
            counts.iter().map(|&c| c as f64 / t).collect(),
            beyond as f64 / t,
            0,
            provenance,
        )
    }

    /// Point mass at `k` with `K = k`.
    pub fn point_mass(k: usize) -> Self {
        let mut masses = vec![0.0; k + 1];
        masses[k] = 1.0;
        Self::new(masses, 0.0, 0, "point mass")
    }

    pub fn k(&self) -> usize {
        self.masses.len() - 1
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.masses.get(k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum::<f64>() + self.tail
    }

    /// `Σ k·masses[k]`, ignoring the tail.
    pub fn mean(&self) -> f64 {
        self.masses.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// CSV with columns `k,mass` and a final `tail` row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "mass"])?;
        for (k, p) in self.masses.iter().enumerate() {
            w.write_record([k.to_string(), format!("{p:e}")])?;
        }
        w.write_record(["tail".to_string(), format!("{:e}", self.tail)])?;
        w.flush()?;
        Ok(())
    }
}

/// Product of two series truncated to `len` coefficients.
fn multiply(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    if a.len().min(b.len()) <= 32 || len <= NAIVE_LIMIT {
        let mut out = vec![0.0; len.min(a.len() + b.len() - 1)];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(out.len() - i) {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = (a.len() + b.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fa.resize(size, Complex::new(0.0, 0.0));
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fb.resize(size, Complex::new(0.0, 0.0));
    fft.process(&mut fa);
    fft.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa.iter()
        .take(len.min(a.len() + b.len() - 1))
        .map(|c| (c.re * scale).max(0.0))
        .collect()
}

/// `1/c` as a series, `c[0] > 0`.
fn reciprocal(c: &[f64], len: usize) -> Vec<f64> {
    let mut b = vec![0.0; len];
    b[0] = 1.0 / c[0];
    for k in 1..len {
        let acc: f64 = (1..=k.min(c.len() - 1)).map(|j| c[j] * b[k - j]).sum();
        b[k] = -acc / c[0];
    }
    b
}

/// `f(a(s))` truncated to `len` coefficients.
fn compose(dist: &OffspringDistribution, a: &[f64], len: usize) -> Vec<f64> {
    if let Some(p) = dist.geometric_p() {
        // f(s) = p / (1 - (1-p)s)
        let mut c: Vec<f64> = a.iter().map(|x| -(1.0 - p) * x).collect();
        c.resize(len, 0.0);
        c[0] += 1.0;
        return reciprocal(&c, len).into_iter().map(|x| (p * x).max(0.0)).collect();
    }
    let pmf = dist.dense_pmf().expect("checked by caller");
    let mut r = vec![pmf[pmf.len() - 1]];
    for &p in pmf.iter().rev().skip(1) {
        r = multiply(&r, a, len);
        if r.is_empty() {
            r.push(0.0);
        }
        r[0] += p;
    }
    r.resize(len, 0.0);
    r
}

fn check_composable(dist: &OffspringDistribution, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidArgument("truncation K must be >= 1".into()));
    }
    if k > MAX_K {
        return Err(Error::InvalidArgument(format!("truncation K = {k} exceeds {MAX_K}")));
    }
    if dist.geometric_p().is_some() {
        return Ok(());
    }
    match dist.dense_pmf() {
        None => Err(Error::InvalidLaw(
            "series composition needs a law with tabulated support".into(),
        )),
        Some(p) if p.len() as u64 > MAX_SUPPORT + 1 => Err(Error::InvalidLaw(format!(
            "support up to {} exceeds the composition limit {MAX_SUPPORT}",
            p.len() - 1
        ))),
        _ => Ok(()),
    }
}

/// The tail is `P[Z_n > 0] - P[1 <= Z_n <= K]` with the survival probability
/// from the complement recursion. Taking `1 - Σ masses` instead would bury
/// survival masses below machine epsilon under rounding noise.
fn finish(dist: &OffspringDistribution, a: Vec<f64>, n: u32, k: usize, survival: f64) -> TruncatedLaw {
    let alive: f64 = a.iter().skip(1).sum();
    let tail = (survival - alive).max(0.0);
    TruncatedLaw::new(a, tail, n, format!("Z_{n} of {} at K = {k}", dist.describe()))
}

fn survivals(dist: &OffspringDistribution, n: u32) -> Vec<f64> {
    let mut s = vec![1.0];
    for _ in 0..n {
        s.push(dist.pgf_complement(s[s.len() - 1]).clamp(0.0, 1.0));
    }
    s
}

/// Exact law of `Z_n` on `{0..K}`; the mass above `K` is reported as tail.
///
/// Coefficients up to `K` of `f∘F` depend only on coefficients up to `K` of
/// `F`, so truncation loses nothing but the tail itself.
pub fn zn_law(dist: &OffspringDistribution, n: u32, k: usize) -> Result<TruncatedLaw> {
    check_composable(dist, k)?;
    let len = k + 1;
    let mut a = vec![0.0; len];
    a[1] = 1.0;
    for _ in 0..n {
        a = compose(dist, &a, len);
    }
    let s = survivals(dist, n);
    Ok(finish(dist, a, n, k, s[n as usize]))
}

/// Laws of `Z_0, ..., Z_n` at a common `K`.
pub fn zn_laws(dist: &OffspringDistribution, n: u32, k: usize) -> Result<Vec<TruncatedLaw>> {
    check_composable(dist, k)?;
    let len = k + 1;
    let mut a = vec![0.0; len];
    a[1] = 1.0;
    let s = survivals(dist, n);
    let mut out = vec![finish(dist, a.clone(), 0, k, 1.0)];
    for g in 1..=n {
        a = compose(dist, &a, len);
        out.push(finish(dist, a.clone(), g, k, s[g as usize]));
    }
    Ok(out)
}

/// `zn_law` starting at `k`, doubling `K` until the tail is below 1e-9.
pub fn zn_law_captured(dist: &OffspringDistribution, n: u32, k: usize) -> Result<TruncatedLaw> {
    let mut k = k.max(1);
    loop {
        let law = zn_law(dist, n, k)?;
        if law.tail < CAPTURED_TAIL {
            return Ok(law);
        }
        if k >= MAX_K {
            return Err(Error::ExcessiveTail { tail: law.tail });
        }
        k = (2 * k).min(MAX_K);
    }
}

/// The law conditioned on being positive.
///
/// The survival mass is summed from the positive entries and the tail rather
/// than taken as `1 - masses[0]`, so laws whose survival probability is far
/// below machine epsilon are conditioned without cancellation.
pub fn conditioned_law(law: &TruncatedLaw) -> Result<TruncatedLaw> {
    let alive: f64 = law.masses.iter().skip(1).sum::<f64>() + law.tail;
    if !(alive >= f64::MIN_POSITIVE) {
        return Err(Error::NoSurvival { mass: alive });
    }
    let mut masses: Vec<f64> = law.masses.iter().map(|p| p / alive).collect();
    masses[0] = 0.0;
    let mut out = TruncatedLaw::new(
        masses,
        law.tail / alive,
        law.generation,
        format!("conditioned on > 0: {}", law.provenance),
    );
    out.insufficient_support = law.insufficient_support;
    Ok(out)
}

/// `k·P[Z = k]/scale` with `scale = m^n`.
pub fn size_bias_law(law: &TruncatedLaw, scale: f64) -> Result<TruncatedLaw> {
    if law.tail >= CAPTURED_TAIL {
        return Err(Error::ExcessiveTail { tail: law.tail });
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("size-bias scale must be positive, got {scale}")));
    }
    let masses: Vec<f64> = law
        .masses
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 * p / scale)
        .collect();
    let total: f64 = masses.iter().sum();
    Ok(TruncatedLaw::new(
        masses,
        (1.0 - total).max(0.0),
        law.generation,
        format!("size-biased: {}", law.provenance),
    ))
}

fn padded(law: &TruncatedLaw, len: usize) -> impl Iterator<Item = f64> + '_ {
    (0..len).map(move |k| law.mass(k))
}

/// `½Σ|a_k - b_k| + ½|tail_a - tail_b|`, zero-extending the shorter law.
pub fn tv_distance(a: &TruncatedLaw, b: &TruncatedLaw) -> f64 {
    let len = a.masses.len().max(b.masses.len());
    let body: f64 = padded(a, len).zip(padded(b, len)).map(|(x, y)| (x - y).abs()).sum();
    (0.5 * (body + (a.tail - b.tail).abs())).min(1.0)
}

/// Whether `b` is stochastically larger than `a` (CDF of `b` below that of `a`).
pub fn stochastically_dominates(b: &TruncatedLaw, a: &TruncatedLaw) -> bool {
    let len = a.masses.len().max(b.masses.len());
    let mut ca = 0.0;
    let mut cb = 0.0;
    for (x, y) in padded(a, len).zip(padded(b, len)) {
        ca += x;
        cb += y;
        if cb > ca + 1e-12 {
            return false;
        }
    }
    b.tail >= a.tail - 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(p: &[f64]) -> OffspringDistribution {
        OffspringDistribution::finite(p).unwrap()
    }

    #[test]
    fn one_generation_is_the_offspring_law() {
        let l = zn_law(&law(&[0.5, 0.0, 0.5]), 1, 2).unwrap();
        assert_eq!(l.masses, vec![0.5, 0.0, 0.5]);
        assert_eq!(l.tail, 0.0);
    }

    #[test]
    fn second_generation_by_hand() {
        // f(f(s)) for f(s) = (1 + s²)/2
        let l = zn_law(&law(&[0.5, 0.0, 0.5]), 2, 4).unwrap();
        let want = [0.625, 0.0, 0.25, 0.0, 0.125];
        for (a, b) in l.masses.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn line_stays_at_one() {
        let l = zn_law(&law(&[0.0, 1.0]), 7, 5).unwrap();
        assert_eq!(l.mass(1), 1.0);
        assert_eq!(l.tail, 0.0);
    }

    #[test]
    fn tail_collects_truncated_mass() {
        let l = zn_law(&law(&[0.0, 0.0, 1.0]), 3, 4).unwrap();
        assert_eq!(l.tail, 1.0);
        assert!(l.insufficient_support);
        let l = zn_law_captured(&law(&[0.0, 0.0, 1.0]), 3, 4).unwrap();
        assert_eq!(l.mass(8), 1.0);
    }

    #[test]
    fn fft_and_naive_products_agree() {
        let a: Vec<f64> = (0..3000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let b: Vec<f64> = (0..2500).map(|i| (-(i as f64) / 300.0).exp()).collect();
        let fast = multiply(&a, &b, 5000);
        let mut slow = vec![0.0; 5000];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < 5000 {
                    slow[i + j] += x * y;
                }
            }
        }
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-11 * y.max(1.0));
        }
    }

    #[test]
    fn geometric_series_composition_matches_closed_form() {
        // critical geometric: P[Z_n = 0] = n/(n+1)
        let g = OffspringDistribution::geometric(0.5).unwrap();
        let l = zn_law(&g, 5, 2000).unwrap();
        assert!((l.mass(0) - 5.0 / 6.0).abs() < 1e-12);
        // P[Z_n = k] = n^{k-1}/(n+1)^{k+1} for k >= 1
        for k in 1..10 {
            let want = 5f64.powi(k - 1) / 6f64.powi(k + 1);
            assert!((l.mass(k as usize) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn conditioning_without_cancellation() {
        // survival ~ 2^-100 is invisible in 1 - P[Z = 0]
        let laws = zn_laws(&law(&[0.75, 0.0, 0.25]), 100, 64).unwrap();
        let mu = conditioned_law(&laws[100]).unwrap();
        assert!((mu.total() - 1.0).abs() < 1e-12);
        assert!(mu.mass(2) > 0.1);
    }

    #[test]
    fn conditioning_and_size_bias() {
        let l = TruncatedLaw::new(vec![0.5, 0.5], 0.0, 1, "");
        assert_eq!(conditioned_law(&l).unwrap().masses, vec![0.0, 1.0]);
        assert!(conditioned_law(&TruncatedLaw::point_mass(0)).is_err());
        let sb = size_bias_law(&TruncatedLaw::point_mass(1), 1.0).unwrap();
        assert_eq!(sb.masses, vec![0.0, 1.0]);
        let z1 = zn_law(&law(&[0.5, 0.0, 0.5]), 1, 8).unwrap();
        let sb = size_bias_law(&z1, 1.0).unwrap();
        assert_eq!(sb.mass(2), 1.0);
        let big = zn_law(&law(&[0.0, 0.0, 1.0]), 3, 4).unwrap();
        assert!(size_bias_law(&big, 8.0).is_err());
    }

    #[test]
    fn tv_and_dominance() {
        let a = TruncatedLaw::point_mass(0);
        let b = TruncatedLaw::point_mass(1);
        assert_eq!(tv_distance(&a, &a), 0.0);
        assert_eq!(tv_distance(&a, &b), 1.0);
        let two = TruncatedLaw::point_mass(2);
        let three = TruncatedLaw::point_mass(3);
        assert!(stochastically_dominates(&two, &two));
        assert!(stochastically_dominates(&three, &two));
        assert!(!stochastically_dominates(&two, &three));
    }

    #[test]
    fn csv_has_tail_row() {
        let mut buf = Vec::new();
        TruncatedLaw::new(vec![0.25, 0.75], 0.0, 1, "").write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next(), Some("k,mass"));
        assert!(s.lines().last().unwrap().starts_with("tail,"));
        assert_eq!(s.lines().count(), 4);
    }
}
