//! Critical processes: survival asymptotics, the conditioned limit law and
//! the size-biased tree.

use rand::Rng;

use super::report::{Metric, Table};
use super::{mean, require, Ctx};
use crate::error::Result;
use crate::offspring::OffspringDistribution;
use crate::pgf::survival_seq;
use crate::rng::replicate_rng;
use crate::simulate::{sample_conditioned, SpineSampler};
use crate::stats::{exponential_cdf, gamma2_cdf, ks_statistic, EmpiricalSample};

fn critical_variance(d: &OffspringDistribution) -> Result<f64> {
    let v = d.variance().finite();
    require(
        (d.mean() - 1.0).abs() < 1e-12 && v.is_some_and(|v| v > 0.0),
        "experiment needs a critical law (m = 1) with finite positive variance",
    )?;
    Ok(v.unwrap())
}

/// Gcd of the positive support points: `Z_n` lives on multiples of it.
fn lattice_span(d: &OffspringDistribution) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    match d.dense_pmf() {
        Some(p) => p
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &m)| m > 0.0)
            .fold(0, |g, (k, _)| gcd(g, k as u64))
            .max(1),
        None => 1,
    }
}

pub(super) fn kolmogorov(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.5, 0.0, 0.5])?;
    let n = ctx.horizon_or(1_000_000);
    require(n >= 1, "horizon must be >= 1")?;
    let var = critical_variance(&d)?;
    let target = 2.0 / var;
    let seq = survival_seq(&d, n)?;
    ctx.metric(Metric::within(
        "n * P[Z_n > 0] at the horizon",
        seq.kolmogorov(n),
        target,
        0.99 * target,
        1.0025 * target,
    ));
    let mut table = Table::new("kolmogorov.csv", &["n", "s_n", "n_s_n"]);
    let mut step = 1usize;
    while step <= n {
        for k in [step, 2 * step, 5 * step] {
            if k <= n {
                table.push(vec![k as f64, seq.s[k], seq.kolmogorov(k)]);
            }
        }
        step *= 10;
    }
    if table.rows.last().map(|r| r[0] as usize) != Some(n) {
        table.push(vec![n as f64, seq.s[n], seq.kolmogorov(n)]);
    }
    ctx.table(table);

    // closed form for the critical geometric law: P[Z_n > 0] = 1/(n+1)
    let g = OffspringDistribution::geometric(0.5)?;
    let gs = survival_seq(&g, 1000)?;
    let dev = gs
        .s
        .iter()
        .enumerate()
        .map(|(k, s)| (s * (k as f64 + 1.0) - 1.0).abs())
        .fold(0.0, f64::max);
    ctx.metric(Metric::at_most(
        "geometric(1/2): max |(n+1) P[Z_n > 0] - 1| over n <= 1000",
        dev,
        Some(0.0),
        1e-9,
    ));
    Ok(())
}

pub(super) fn yaglom(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.5, 0.0, 0.5])?;
    let n = ctx.horizon_or(100);
    let reps = ctx.replicates_or(10_000);
    let var = critical_variance(&d)?;
    require(reps >= 10, "yaglom needs at least 10 replicates")?;
    let theta = var / 2.0;
    let draws = ctx
        .rep
        .try_run("yaglom", reps, |_, rng| sample_conditioned(&d, n, rng))?;
    let scaled: Vec<f64> = draws.iter().map(|d| d.value as f64 / n as f64).collect();
    let sample = EmpiricalSample::new(scaled.clone())?;
    let ks = ks_statistic(&sample, &exponential_cdf(theta)?)?;
    ctx.metric(Metric::at_most(
        "KS of (Z_n/n | Z_n > 0) against exponential(sigma^2/2)",
        ks,
        Some(0.0),
        0.035,
    ));
    ctx.metric(Metric::within(
        "mean of (Z_n/n | Z_n > 0)",
        mean(&scaled),
        theta,
        0.94 * theta,
        1.06 * theta,
    ));

    // Z_n sits on a lattice of span d; spreading each value uniformly over
    // its lattice cell removes the atoms without moving the limit.
    let span = lattice_span(&d) as f64;
    let mut rng = replicate_rng(ctx.cfg.seed, "yaglom/jitter", 0);
    let jittered: Vec<f64> = draws
        .iter()
        .map(|d| (d.value as f64 - span * rng.random::<f64>()).max(0.0) / n as f64)
        .collect();
    let ks_jitter = ks_statistic(&EmpiricalSample::new(jittered)?, &exponential_cdf(theta)?)?;
    ctx.metric(Metric::info("KS after spreading Z_n over its lattice cell", ks_jitter));
    let attempts: u64 = draws.iter().map(|d| d.attempts).sum();
    ctx.metric(Metric::info("rejection acceptance rate", reps as f64 / attempts as f64));
    let exact = survival_seq(&d, n)?;
    ctx.metric(Metric::info("exact P[Z_n > 0]", exact.s[n]));
    // E[Z_n | Z_n > 0] = 1/s_n since E[Z_n] = 1
    ctx.metric(Metric::info(
        "exact E[Z_n/n | Z_n > 0]",
        1.0 / (n as f64 * exact.s[n]),
    ));

    let mut table = Table::new("yaglom.csv", &["replicate", "z_n", "attempts"]);
    for (i, d) in draws.iter().enumerate() {
        table.push(vec![i as f64, d.value as f64, d.attempts as f64]);
    }
    ctx.table(table);
    Ok(())
}

pub(super) fn harris_spine(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.5, 0.0, 0.5])?;
    let n = ctx.horizon_or(500);
    let reps = ctx.replicates_or(10_000);
    let var = critical_variance(&d)?;
    require(n >= 1 && reps >= 10, "harris-spine needs n >= 1 and at least 10 replicates")?;
    let theta = var / 2.0;
    let sampler = SpineSampler::new(&d)?;
    let ends = ctx.rep.run("harris-spine", reps, |_, rng| {
        let s = sampler.sample(n, rng);
        (s.z[n], s.left[n], s.right[n])
    });
    let nf = n as f64;
    let z: Vec<f64> = ends.iter().map(|e| e.0 as f64 / nf).collect();
    let left: Vec<f64> = ends.iter().map(|e| e.1 as f64 / nf).collect();
    let right: Vec<f64> = ends.iter().map(|e| e.2 as f64 / nf).collect();
    let exp = exponential_cdf(theta)?;
    let ks_z = ks_statistic(&EmpiricalSample::new(z.clone())?, &gamma2_cdf(theta)?)?;
    let ks_l = ks_statistic(&EmpiricalSample::new(left)?, &exp)?;
    let ks_r = ks_statistic(&EmpiricalSample::new(right)?, &exp)?;
    ctx.metric(Metric::at_most("KS of Z_n/n against gamma(2, sigma^2/2)", ks_z, Some(0.0), 0.035));
    ctx.metric(Metric::at_most(
        "KS of left_n/n against exponential(sigma^2/2)",
        ks_l,
        Some(0.0),
        0.035,
    ));
    ctx.metric(Metric::at_most(
        "KS of right_n/n against exponential(sigma^2/2)",
        ks_r,
        Some(0.0),
        0.035,
    ));
    // E[Z_n] under size-biasing is E[Z_n^2] = 1 + sigma^2 n
    let target = (1.0 + var * nf) / nf;
    ctx.metric(Metric::within("mean of Z_n/n", mean(&z), target, 0.95 * target, 1.05 * target));

    let mut table = Table::new("harris_spine.csv", &["replicate", "z_n", "left_n", "right_n"]);
    for (i, e) in ends.iter().enumerate() {
        table.push(vec![i as f64, e.0 as f64, e.1 as f64, e.2 as f64]);
    }
    ctx.table(table);
    Ok(())
}
