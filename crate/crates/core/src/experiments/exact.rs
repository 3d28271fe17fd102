//! Experiments computed exactly from pgf iteration, series composition and
//! tree enumeration.

use super::growth::heavy_with_mean;
use super::report::{Metric, Table};
use super::{require, Ctx};
use crate::error::Result;
use crate::offspring::OffspringDistribution;
use crate::pgf::{
    conditioned_law, stochastically_dominates, survival_seq, tv_distance, zn_law, zn_laws,
    TruncatedLaw,
};
use crate::simulate::{enumerate_trees, gw_probability, spine_path_probability};

const RATE_HORIZON: usize = 500;
const HEAVY_SUB_MEAN: f64 = 0.9;

fn panel() -> Result<Vec<OffspringDistribution>> {
    Ok(vec![
        OffspringDistribution::finite(&[0.75, 0.0, 0.25])?,
        OffspringDistribution::finite(&[0.5, 0.25, 0.25])?,
        OffspringDistribution::finite(&[0.2, 0.5, 0.2, 0.1])?,
        OffspringDistribution::finite(&[0.5, 0.0, 0.5])?,
        OffspringDistribution::finite(&[0.25, 0.0, 0.75])?,
        OffspringDistribution::geometric(0.5)?,
        OffspringDistribution::geometric(2.0 / 3.0)?,
        OffspringDistribution::geometric(0.4)?,
        OffspringDistribution::truncated_poisson(0.8, 20)?,
        OffspringDistribution::truncated_poisson(1.5, 20)?,
    ])
}

pub(super) fn subcritical_rate(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.75, 0.0, 0.25])?;
    require(d.mean() < 1.0, "subcritical-rate needs a subcritical law")?;
    let n = ctx.horizon_or(RATE_HORIZON).max(200);
    let heavy = heavy_with_mean(HEAVY_SUB_MEAN)?;
    let mut laws = panel()?;
    laws.push(d.clone());
    laws.push(heavy.clone());

    let mut worst = f64::NEG_INFINITY;
    let mut table = Table::new("subcritical_rate.csv", &["law", "n", "s_n", "ratio"]);
    for (i, law) in laws.iter().enumerate() {
        let seq = survival_seq(law, n)?;
        worst = worst.max(seq.max_ratio_increase());
        for k in [0, 1, 2, 5, 10, 20, 50, 100, 200, 500].into_iter().filter(|&k| k <= n) {
            table.push(vec![i as f64, k as f64, seq.s[k], seq.ratios[k]]);
        }
    }
    ctx.metric(Metric::at_most(
        "largest increase of P[Z_n > 0]/m^n over the panel",
        worst,
        Some(0.0),
        1e-13,
    ));

    let seq = survival_seq(&d, n)?;
    let (r100, r200) = (seq.ratios[100], seq.ratios[200]);
    ctx.metric(Metric::at_most(
        "|r_200 - r_100| / r_100",
        (r200 - r100).abs() / r100,
        Some(0.0),
        1e-3,
    ));
    ctx.metric(Metric::info("r_200 (limit of P[Z_n > 0]/m^n)", r200));

    let hs = survival_seq(&heavy, 200)?;
    ctx.metric(Metric::at_most(
        "heavy tail: r_200 / r_100",
        hs.ratios[200] / hs.ratios[100],
        None,
        0.9,
    ));
    ctx.metric(Metric::info("heavy tail: r_100", hs.ratios[100]));
    ctx.metric(Metric::info("heavy tail: r_200", hs.ratios[200]));
    ctx.metric(Metric::info("heavy tail: mean (truncated)", heavy.mean()));
    ctx.table(table);
    Ok(())
}

pub(super) fn williamson(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.75, 0.0, 0.25])?;
    require(d.mean() < 1.0, "williamson needs a subcritical law")?;
    let n = ctx.horizon_or(200).max(101);
    let k = ctx.cfg.k;
    let mu: Vec<TruncatedLaw> = zn_laws(&d, n as u32, k)?
        .iter()
        .map(conditioned_law)
        .collect::<Result<_>>()?;
    let tv: Vec<f64> = (1..=n).map(|j| tv_distance(&mu[j], &mu[j - 1])).collect();
    let tail_sum: f64 = tv[100..].iter().sum();
    ctx.metric(Metric::at_most(
        "sum of TV(mu_n, mu_{n-1}) over n = 101..",
        tail_sum,
        Some(0.0),
        1e-6,
    ));
    let violations = (1..=100)
        .filter(|&j| !stochastically_dominates(&mu[j], &mu[j - 1]))
        .count();
    ctx.metric(Metric::at_most(
        "stochastic dominance violations mu_{n-1} <= mu_n for n <= 100",
        violations as f64,
        Some(0.0),
        0.0,
    ));
    ctx.metric(Metric::info("sum of TV(mu_n, mu_{n-1}) over n = 1..", tv.iter().sum()));
    ctx.metric(Metric::info("largest tail mass of mu_n", mu.iter().map(|m| m.tail).fold(0.0, f64::max)));
    let mut table = Table::new("williamson.csv", &["n", "tv", "mean_mu_n"]);
    for (j, t) in tv.iter().enumerate() {
        table.push(vec![(j + 1) as f64, *t, mu[j + 1].mean()]);
    }
    ctx.table(table);
    Ok(())
}

/// Laws on `{0,1,2}` with masses in quarters, excluding the pure extinction law.
fn quarter_grid() -> Result<Vec<OffspringDistribution>> {
    let mut out = Vec::new();
    for a in 0..=4u32 {
        for b in 0..=(4 - a) {
            let c = 4 - a - b;
            if a == 4 {
                continue;
            }
            out.push(OffspringDistribution::finite(&[
                a as f64 / 4.0,
                b as f64 / 4.0,
                c as f64 / 4.0,
            ])?);
        }
    }
    Ok(out)
}

pub(super) fn measure_identity(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.horizon_or(2);
    require((1..=3).contains(&n), "measure-identity enumerates depths 1 to 3")?;
    let laws = match &ctx.cfg.offspring {
        Some(spec) => vec![spec.build()?],
        None => quarter_grid()?,
    };
    let (mut goal, mut ac, mut uniform, mut oracle, mut mass) = (0f64, 0f64, 0f64, 0f64, 0f64);
    let mut table = Table::new(
        "measure_identity.csv",
        &["law", "p0", "p1", "p2", "goal", "ac", "uniform", "enumeration"],
    );
    for (li, d) in laws.iter().enumerate() {
        let m = d.mean();
        let scale = m.powi(n as i32);
        let trees = enumerate_trees(d, n)?;
        let width = trees.iter().map(|t| t.0.sizes[n] as usize).max().unwrap_or(0);
        let mut law = vec![0.0; width + 1];
        let mut total = 0.0;
        let (mut g, mut a, mut u) = (0f64, 0f64, 0f64);
        for (t, p) in &trees {
            let gw = gw_probability(t, d, n)?;
            total += gw;
            let zn = t.sizes[n] as usize;
            law[zn] += p;
            let mut hat = 0.0;
            let paths: Vec<f64> =
                (0..zn).map(|v| spine_path_probability(t, d, n, v)).collect::<Result<_>>()?;
            for &sp in &paths {
                g = g.max((sp - gw / scale).abs());
                hat += sp;
            }
            a += (hat - zn as f64 / scale * gw).abs();
            if hat > 0.0 {
                for &sp in &paths {
                    u = u.max((sp / hat - 1.0 / zn as f64).abs());
                }
            }
        }
        let exact = zn_law(d, n as u32, width.max(1))?;
        let e = law
            .iter()
            .enumerate()
            .map(|(k, &p)| (p - exact.mass(k)).abs())
            .fold(exact.tail, f64::max);
        goal = goal.max(g);
        ac = ac.max(a);
        uniform = uniform.max(u);
        oracle = oracle.max(e);
        mass = mass.max((total - 1.0).abs());
        let p: Vec<f64> = (0..3).map(|k| d.pmf(k)).collect();
        table.push(vec![li as f64, p[0], p[1], p[2], g, a, u, e]);
    }
    ctx.metric(Metric::at_most(
        "max |spine probability of [t;v] - m^-n GW[t]|",
        goal,
        Some(0.0),
        1e-10,
    ));
    ctx.metric(Metric::at_most(
        "max over laws of sum_t |GW^[t] - W_n(t) GW[t]|",
        ac,
        Some(0.0),
        1e-10,
    ));
    ctx.metric(Metric::at_most(
        "max deviation of v_n from uniform on its level",
        uniform,
        Some(0.0),
        1e-10,
    ));
    ctx.metric(Metric::at_most(
        "max |enumerated law of Z_n - series law of Z_n|",
        oracle,
        Some(0.0),
        1e-12,
    ));
    ctx.metric(Metric::at_most(
        "max |total enumerated probability - 1|",
        mass,
        Some(0.0),
        1e-12,
    ));
    ctx.metric(Metric::info("laws checked", laws.len() as f64));
    ctx.table(table);
    Ok(())
}
