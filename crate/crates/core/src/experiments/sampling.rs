//! Agreement between samplers, and the exponential characterisation test.

use rand_distr::{Distribution, Exp};
use rand::Rng;

use super::report::{Metric, Table};
use super::{empirical_law, require, Ctx};
use crate::error::Result;
use crate::pgf::{size_bias_law, tv_distance, zn_law_captured, DEFAULT_K};
use crate::rng::replicate_rng;
use crate::simulate::{simulate_immigration, spine_as_immigration, ImmigrationLaw, SpineSampler};
use crate::stats::{pakes_khattree_test, EmpiricalSample};

pub(super) fn spine_immigration(ctx: &mut Ctx) -> Result<()> {
    let d = ctx.offspring_or(&[0.5, 0.0, 0.5])?;
    let draws = ctx.replicates_or(1_000_000);
    let n = ctx.horizon_or(5);
    require(n >= 2, "horizon must be >= 2")?;
    let sampler = SpineSampler::new(&d)?;

    let z2: Vec<u64> = ctx.rep.run("spine-immigration/z2", draws, |_, rng| sampler.sample(2, rng).z[2]);
    let exact = size_bias_law(&zn_law_captured(&d, 2, DEFAULT_K)?, d.mean().powi(2))?;
    let tv2 = tv_distance(&empirical_law(&z2), &exact);
    ctx.metric(Metric::at_most(
        "TV(spine law of Z_2, size-biased series law of Z_2)",
        tv2,
        Some(0.0),
        0.005,
    ));

    let spine: Vec<u64> = ctx.rep.run("spine-immigration/spine", draws, |_, rng| {
        spine_as_immigration(&sampler.sample(n, rng)).z[n]
    });
    let imm = ImmigrationLaw::SizeBiasedMinusOne(sampler.biased().clone());
    let direct: Vec<u64> = ctx.rep.try_run("spine-immigration/direct", draws, |_, rng| {
        Ok(simulate_immigration(&d, &imm, n, u64::MAX, rng)?.z[n])
    })?;
    let (a, b) = (empirical_law(&spine), empirical_law(&direct));
    let tvn = tv_distance(&a, &b);
    ctx.metric(Metric::at_most(
        "TV(spine Z_n - 1, immigration Z_n with Y = L^ - 1)",
        tvn,
        Some(0.0),
        0.01,
    ));
    ctx.metric(Metric::info("mean spine Z_2", z2.iter().sum::<u64>() as f64 / z2.len() as f64));
    ctx.metric(Metric::info("series mean of size-biased Z_2", exact.mean()));

    let mut table = Table::new("spine_immigration.csv", &["k", "spine_z2", "series_z2", "spine_zn_minus_1", "immigration_zn"]);
    let top = a.k().max(b.k()).max(exact.k());
    let z2_law = empirical_law(&z2);
    for k in 0..=top {
        table.push(vec![k as f64, z2_law.mass(k), exact.mass(k), a.mass(k), b.mass(k)]);
    }
    ctx.table(table);
    Ok(())
}

pub(super) fn pakes_khattree(ctx: &mut Ctx) -> Result<()> {
    let size = ctx.replicates_or(100_000) as usize;
    let seed = ctx.cfg.seed;
    let mut table = Table::new("pakes_khattree.csv", &["input", "ks", "threshold", "pass"]);

    let exp = Exp::new(2.0).expect("positive rate");
    let mut rng = replicate_rng(seed, "pakes-khattree/exponential", 0);
    let sample = EmpiricalSample::new((0..size).map(|_| exp.sample(&mut rng)).collect())?;
    let r = pakes_khattree_test(&sample, &mut rng)?;
    ctx.metric(Metric::at_most("exponential input: KS", r.value, Some(0.0), 0.02));
    ctx.metric(Metric::at_least(
        "exponential input: test passes (1 = pass)",
        r.pass as u8 as f64,
        Some(1.0),
        1.0,
    ));
    table.push(vec![0.0, r.value, r.threshold, r.pass as u8 as f64]);

    let mut rng = replicate_rng(seed, "pakes-khattree/uniform", 0);
    let sample = EmpiricalSample::new((0..size).map(|_| rng.random::<f64>()).collect())?;
    let r = pakes_khattree_test(&sample, &mut rng)?;
    ctx.metric(Metric::at_least("uniform input: KS", r.value, None, 0.05));
    ctx.metric(Metric::at_most(
        "uniform input: test passes (1 = pass)",
        r.pass as u8 as f64,
        Some(0.0),
        0.0,
    ));
    table.push(vec![1.0, r.value, r.threshold, r.pass as u8 as f64]);

    let mut rng = replicate_rng(seed, "pakes-khattree/constant", 0);
    let sample = EmpiricalSample::new(vec![1.0; size])?;
    let r = pakes_khattree_test(&sample, &mut rng)?;
    ctx.metric(Metric::at_least("constant input: KS", r.value, None, 0.5));
    ctx.metric(Metric::info("threshold 2*1.63/sqrt(N)", r.threshold));
    table.push(vec![2.0, r.value, r.threshold, r.pass as u8 as f64]);
    ctx.table(table);
    Ok(())
}
