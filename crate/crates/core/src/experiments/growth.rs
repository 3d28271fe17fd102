//! Supercritical and subcritical growth, with and without immigration, and
//! random environments.

use super::report::{Metric, Table};
use super::{empirical_law, mean, median, require, Ctx};
use crate::error::Result;
use crate::offspring::OffspringDistribution;
use crate::pgf::{extinction_prob, tv_distance};
use crate::simulate::{
    heavy_immigration_sampler, simulate_bpre, simulate_immigration, simulate_path,
    HeavyImmigrationStyle, ImmigrationLaw,
};
use crate::stats::{classify_growth, GrowthVerdict};

/// Mean of the heavy-tailed supercritical law used for the divergent side.
const HEAVY_SUPER_MEAN: f64 = 1.2;
const HEAVY_CUTOFF: u64 = 1 << 60;
const HEAVY_PATHS: u64 = 10_000;
/// Cap used where the horizon needs populations beyond the default cap.
const WIDE_CAP: u64 = 1 << 62;
const GROWTH_HORIZON: usize = 200;

/// The heavy-tailed mixture with its atom at 0, weighted to have mean `m`.
pub(crate) fn heavy_with_mean(m: f64) -> Result<OffspringDistribution> {
    let base = OffspringDistribution::heavy_tail_with_atom(0.0, 0, HEAVY_CUTOFF)?;
    let alpha = 1.0 - m / base.mean();
    OffspringDistribution::heavy_tail_with_atom(alpha, 0, HEAVY_CUTOFF)
}

fn bounded_immigration(ctx: &Ctx, d: &OffspringDistribution) -> Result<ImmigrationLaw> {
    match &ctx.cfg.immigration {
        Some(spec) => spec.build(d),
        None => Ok(ImmigrationLaw::Law(OffspringDistribution::truncated_poisson(1.0, 8)?)),
    }
}

pub(super) fn kesten_stigum(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.25, 0.0, 0.75])?;
    let n = ctx.horizon_or(30);
    let reps = ctx.replicates_or(100_000);
    require(d.mean() > 1.0, "kesten-stigum needs a supercritical law")?;
    let q = extinction_prob(&d)?;
    let cap = ctx.cfg.cap;
    let ends = ctx.rep.try_run("kesten-stigum", reps, |_, rng| {
        let p = simulate_path(&d, n, 1, cap, rng)?;
        Ok((p.last(), p.last_w(), p.saturated()))
    })?;
    let w: Vec<f64> = ends.iter().map(|e| e.1).collect();
    ctx.metric(Metric::within("mean W_n", mean(&w), 1.0, 0.98, 1.02));
    let small = w.iter().filter(|&&x| x < 1e-6).count() as f64 / w.len() as f64;
    ctx.metric(Metric::within("fraction with W_n < 1e-6", small, q, q - 0.01, q + 0.01));
    ctx.metric(Metric::info(
        "saturated paths",
        ends.iter().filter(|e| e.2).count() as f64,
    ));
    let mut table = Table::new("kesten_stigum.csv", &["replicate", "z_n", "w_n", "saturated"]);
    for (i, e) in ends.iter().enumerate() {
        table.push(vec![i as f64, e.0 as f64, e.1, e.2 as u8 as f64]);
    }
    ctx.table(table);

    // divergent side: E[L log L] = ∞
    let heavy = heavy_with_mean(HEAVY_SUPER_MEAN)?;
    let (n1, n2) = (30usize, 60usize);
    let heavy_ends = ctx.rep.try_run("kesten-stigum/heavy", HEAVY_PATHS, |_, rng| {
        let p = simulate_path(&heavy, n2, 1, cap, rng)?;
        Ok((p.z[n1], p.w[n1], p.z[n2], p.w[n2], p.saturated()))
    })?;
    let alive = |pick: fn(&(u64, f64, u64, f64, bool)) -> (u64, f64)| -> Vec<f64> {
        heavy_ends
            .iter()
            .filter(|e| !e.4)
            .map(pick)
            .filter(|(z, _)| *z > 0)
            .map(|(_, w)| w)
            .collect()
    };
    let w1 = alive(|e| (e.0, e.1));
    let w2 = alive(|e| (e.2, e.3));
    let ratio = median(&w2) / median(&w1);
    ctx.metric(Metric::at_most(
        "heavy tail: median W_60 / median W_30 over surviving unsaturated paths",
        ratio,
        None,
        0.5,
    ));
    if let crate::offspring::Family::HeavyTail { alpha, .. } = heavy.family() {
        ctx.metric(Metric::info("heavy tail: mixture weight of the atom at 0", *alpha));
    }
    ctx.metric(Metric::info("heavy tail: mean (truncated)", heavy.mean()));
    ctx.metric(Metric::info(
        "heavy tail: bound on the untruncated mean",
        heavy.untruncated_mean_bound().unwrap_or(f64::NAN),
    ));
    ctx.metric(Metric::info("heavy tail: surviving paths at n = 30", w1.len() as f64));
    ctx.metric(Metric::info("heavy tail: surviving paths at n = 60", w2.len() as f64));
    ctx.metric(Metric::info(
        "heavy tail: saturated paths",
        heavy_ends.iter().filter(|e| e.4).count() as f64,
    ));
    let mut table =
        Table::new("kesten_stigum_heavy.csv", &["replicate", "w_30", "w_60", "saturated"]);
    for (i, e) in heavy_ends.iter().enumerate() {
        table.push(vec![i as f64, e.1, e.3, e.4 as u8 as f64]);
    }
    ctx.table(table);
    Ok(())
}

fn verdict_code(v: GrowthVerdict) -> f64 {
    match v {
        GrowthVerdict::LinearExplosive => 1.0,
        GrowthVerdict::Inconclusive => 0.0,
        GrowthVerdict::SublinearLimsup => -1.0,
    }
}

pub(super) fn seneta(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.25, 0.0, 0.75])?;
    let n = ctx.horizon_or(80);
    let reps = ctx.replicates_or(1000);
    require(d.mean() > 1.0, "seneta needs a supercritical law")?;
    require(n >= 2, "horizon must be >= 2")?;
    let cap = ctx.cfg.cap.max(WIDE_CAP);
    let imm = bounded_immigration(ctx, &d)?;
    let half = n / 2;
    let ends = ctx.rep.try_run("seneta/bounded", reps, |_, rng| {
        let p = simulate_immigration(&d, &imm, n, cap, rng)?;
        let w = p.normalised.as_ref().expect("supercritical");
        Ok((w[half], w[n], p.saturated()))
    })?;
    let fresh: Vec<_> = ends.iter().filter(|e| !e.2).collect();
    let settled = fresh
        .iter()
        .filter(|e| e.0 > 0.0 && (e.1 / e.0 - 1.0).abs() < 0.01)
        .count() as f64
        / fresh.len().max(1) as f64;
    ctx.metric(Metric::at_least(
        "bounded immigration: fraction of unsaturated paths with |W_n/W_{n/2} - 1| < 1%",
        settled,
        None,
        0.95,
    ));
    ctx.metric(Metric::info("bounded immigration: unsaturated paths", fresh.len() as f64));
    let mut table = Table::new("seneta_bounded.csv", &["replicate", "w_half", "w_n", "saturated"]);
    for (i, e) in ends.iter().enumerate() {
        table.push(vec![i as f64, e.0, e.1, e.2 as u8 as f64]);
    }
    ctx.table(table);

    // E[log⁺ Y] = ∞
    let heavy = heavy_immigration_sampler(HeavyImmigrationStyle::LogPareto);
    let len = 2 * GROWTH_HORIZON;
    let paths = ctx.rep.try_run("seneta/log-pareto", reps, |_, rng| {
        let p = simulate_immigration(&d, &heavy, len, cap, rng)?;
        let log_z: Vec<f64> = p.z.iter().map(|&z| (z.max(1) as f64).ln()).collect();
        let mut log_y = vec![0.0];
        log_y.extend(p.y.iter().map(|&y| (y.max(1) as f64).ln()));
        Ok((log_z, log_y, p.saturated()))
    })?;
    let log_z: Vec<Vec<f64>> = paths.iter().map(|p| p.0.clone()).collect();
    let log_y: Vec<Vec<f64>> = paths.iter().map(|p| p.1.clone()).collect();
    let gz = classify_growth(&log_z, GROWTH_HORIZON)?;
    let gy = classify_growth(&log_y, GROWTH_HORIZON)?;
    ctx.metric(Metric::at_least(
        "log-pareto immigration: growth ratio of log+ Z_n (>= 2 is explosive)",
        gz.ratio,
        None,
        2.0,
    ));
    ctx.metric(Metric::info(
        "log-pareto immigration: verdict on log+ Z_n (1 explosive, 0 inconclusive, -1 sublinear)",
        verdict_code(gz.verdict),
    ));
    ctx.metric(Metric::info("log-pareto immigration: growth ratio of log+ Y_n", gy.ratio));
    ctx.metric(Metric::info(
        "log-pareto immigration: saturated paths",
        paths.iter().filter(|p| p.2).count() as f64,
    ));
    let mut table = Table::new(
        "seneta_log_pareto.csv",
        &["replicate", "log_z_horizon", "log_z_double", "saturated"],
    );
    for (i, p) in paths.iter().enumerate() {
        table.push(vec![i as f64, p.0[GROWTH_HORIZON], p.0[len], p.2 as u8 as f64]);
    }
    ctx.table(table);
    Ok(())
}

pub(super) fn heathcote(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.75, 0.0, 0.25])?;
    let n = ctx.horizon_or(100);
    let reps = ctx.replicates_or(100_000);
    require(d.mean() < 1.0, "heathcote needs a subcritical law")?;
    require(n >= 2, "horizon must be >= 2")?;
    let half = n / 2;
    let imm = bounded_immigration(ctx, &d)?;
    let cap = ctx.cfg.cap.max(WIDE_CAP);
    let bounded = ctx.rep.try_run("heathcote/bounded", reps, |_, rng| {
        let p = simulate_immigration(&d, &imm, n, cap, rng)?;
        Ok((p.z[half], p.z[n]))
    })?;
    let a: Vec<u64> = bounded.iter().map(|e| e.0).collect();
    let b: Vec<u64> = bounded.iter().map(|e| e.1).collect();
    let tv = tv_distance(&empirical_law(&a), &empirical_law(&b));
    ctx.metric(Metric::at_most(
        "bounded immigration: TV(empirical Z_{n/2}, empirical Z_n)",
        tv,
        Some(0.0),
        0.02,
    ));

    let heavy = heavy_immigration_sampler(HeavyImmigrationStyle::LogPareto);
    let lp = ctx.rep.try_run("heathcote/log-pareto", reps, |_, rng| {
        let p = simulate_immigration(&d, &heavy, n, cap, rng)?;
        Ok((p.z[half], p.z[n], p.saturated()))
    })?;
    let m1 = median(&lp.iter().map(|e| e.0 as f64).collect::<Vec<_>>());
    let m2 = median(&lp.iter().map(|e| e.1 as f64).collect::<Vec<_>>());
    ctx.metric(Metric::at_least(
        "log-pareto immigration: median Z_n / median Z_{n/2}",
        m2 / m1,
        None,
        2.0,
    ));
    ctx.metric(Metric::info("log-pareto immigration: median Z_{n/2}", m1));
    ctx.metric(Metric::info("log-pareto immigration: median Z_n", m2));
    ctx.metric(Metric::info(
        "log-pareto immigration: saturated paths",
        lp.iter().filter(|e| e.2).count() as f64,
    ));
    let mut table = Table::new(
        "heathcote.csv",
        &["replicate", "bounded_z_half", "bounded_z_n", "log_pareto_z_half", "log_pareto_z_n"],
    );
    for (i, (x, y)) in bounded.iter().zip(&lp).enumerate() {
        table.push(vec![i as f64, x.0 as f64, x.1 as f64, y.0 as f64, y.1 as f64]);
    }
    ctx.table(table);
    Ok(())
}

pub(super) fn bpre(ctx: &mut Ctx) -> Result<()> {
    let first = ctx.offspring_or(&[0.25, 0.0, 0.75])?;
    let envs = [first, OffspringDistribution::finite(&[0.0, 0.0, 1.0])?];
    let weights = [0.5, 0.5];
    let n = ctx.horizon_or(20);
    let reps = ctx.replicates_or(100_000);
    let cap = ctx.cfg.cap;
    let ends = ctx.rep.try_run("bpre", reps, |_, rng| {
        let p = simulate_bpre(&envs, &weights, n, cap, rng)?;
        Ok((p.path.last(), p.m[n], p.path.saturated()))
    })?;
    let w: Vec<f64> = ends.iter().map(|e| e.0 as f64 / e.1).collect();
    ctx.metric(Metric::within("mean Z_n/M_n", mean(&w), 1.0, 0.97, 1.03));
    ctx.metric(Metric::info(
        "fraction extinct",
        ends.iter().filter(|e| e.0 == 0).count() as f64 / ends.len() as f64,
    ));
    ctx.metric(Metric::info("saturated paths", ends.iter().filter(|e| e.2).count() as f64));
    let mut table = Table::new("bpre.csv", &["replicate", "z_n", "m_n"]);
    for (i, e) in ends.iter().enumerate() {
        table.push(vec![i as f64, e.0 as f64, e.1]);
    }
    ctx.table(table);
    Ok(())
}
