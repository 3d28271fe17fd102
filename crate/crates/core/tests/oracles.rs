//! Cross-checks between independent routes to the same quantity.

use bplab::offspring::OffspringDistribution;
use bplab::pgf::{
    conditioned_law, extinction_prob, pgf_eval, size_bias_law, survival_seq, tv_distance,
    zn_law, zn_law_captured, TruncatedLaw,
};
use bplab::rng::seeded;
use bplab::simulate::{
    enumerate_trees, sample_conditioned, simulate_immigration, simulate_path, simulate_spine,
    simulate_tree, spine_as_immigration, ImmigrationLaw, LogPareto,
};
use bplab::stats::{mean_ci, size_biased_resample, EmpiricalSample};

fn law(p: &[f64]) -> OffspringDistribution {
    OffspringDistribution::finite(p).unwrap()
}

/// Law of `Z_n` on `0..=k` by conditioning on `Z_{n-1}` and convolving the
/// offspring law with itself. Values above `k` never return below it.
fn convolution_oracle(p: &[f64], n: usize, k: usize) -> Vec<f64> {
    let conv = |a: &[f64], b: &[f64]| {
        let mut out = vec![0.0; k + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate().take(k + 1 - i.min(k + 1)) {
                if i + j <= k {
                    out[i + j] += x * y;
                }
            }
        }
        out
    };
    let mut law = vec![0.0; k + 1];
    law[1] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; k + 1];
        let mut power = vec![0.0; k + 1];
        power[0] = 1.0;
        for (j, &w) in law.iter().enumerate() {
            if j > 0 {
                power = conv(&power, p);
            }
            for (v, x) in power.iter().enumerate() {
                next[v] += w * x;
            }
        }
        law = next;
    }
    law
}

#[test]
fn moments_by_direct_summation() {
    for p in [vec![0.25, 0.0, 0.75], vec![0.5, 0.0, 0.5], vec![0.1, 0.2, 0.3, 0.4]] {
        let d = law(&p);
        let m: f64 = p.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
        let m2: f64 = p.iter().enumerate().map(|(k, x)| (k * k) as f64 * x).sum();
        let ll: f64 = p
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, x)| k as f64 * (k as f64).ln() * x)
            .sum();
        assert!((d.mean() - m).abs() < 1e-12);
        assert!((d.variance().finite().unwrap() - (m2 - m * m)).abs() < 1e-12);
        assert!((d.llogl().finite().unwrap() - ll).abs() < 1e-12);
    }
    let half = law(&[0.5, 0.0, 0.5]);
    assert!((half.llogl().finite().unwrap() - 2f64.ln()).abs() < 1e-15);

    let g = OffspringDistribution::geometric(0.5).unwrap();
    let (mut m, mut m2) = (0.0, 0.0);
    for k in 0..200 {
        let p = 0.5f64.powi(k + 1);
        m += k as f64 * p;
        m2 += (k * k) as f64 * p;
    }
    assert!((g.mean() - m).abs() < 1e-12);
    assert!((g.variance().finite().unwrap() - (m2 - m * m)).abs() < 1e-10);
}

#[test]
fn heavy_tail_mean_by_partial_sums() {
    let cutoff = 1_000_000u64;
    let d = OffspringDistribution::heavy_tail(0.8, cutoff).unwrap();
    let (mut norm, mut first) = (0.0f64, 0.0f64);
    for k in (2..=cutoff).rev() {
        let w = 1.0 / ((k * k) as f64 * (k as f64).ln().powi(2));
        norm += w;
        first += k as f64 * w;
    }
    let m = 0.8 * 2.0 + 0.2 * first / norm;
    assert!(m > 1.0);
    assert!((d.mean() - m).abs() < 1e-9 * m, "{} vs {m}", d.mean());
    assert!(OffspringDistribution::heavy_tail(0.0, cutoff).unwrap().llogl().is_infinite());
}

#[test]
fn size_biased_identity_on_finite_laws() {
    for p in [vec![0.25, 0.0, 0.75], vec![0.1, 0.2, 0.3, 0.4], vec![0.3, 0.3, 0.0, 0.0, 0.4]] {
        let d = law(&p);
        let sb = d.size_biased().unwrap();
        let m = d.mean();
        assert_eq!(sb.pmf(0), 0.0);
        let g: [fn(f64) -> f64; 2] = [|x| x, |x| x.ln().max(0.0)];
        for f in g {
            let lhs: f64 = (1..p.len() as u64).map(|k| sb.pmf(k) * f(k as f64)).sum();
            let rhs: f64 = p.iter().enumerate().map(|(k, x)| k as f64 * x * f(k as f64)).sum::<f64>() / m;
            assert!((lhs - rhs).abs() < 1e-15);
        }
        // E[log⁺(L̂ - 1)] = E[L log⁺(L - 1)]/m
        let lhs: f64 = (1..p.len() as u64).map(|k| sb.pmf(k) * ((k - 1) as f64).ln().max(0.0)).sum();
        let rhs: f64 = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, x)| k as f64 * x * ((k - 1) as f64).ln().max(0.0))
            .sum::<f64>()
            / m;
        assert!((lhs - rhs).abs() < 1e-15);
        let v = d.variance().finite().unwrap();
        assert!((sb.mean() - (v + m * m) / m).abs() < 1e-9);
    }
}

#[test]
fn sample_means_within_four_standard_errors() {
    let mut rng = seeded(3);
    let laws = [
        law(&[0.5, 0.0, 0.5]),
        law(&[0.25, 0.0, 0.75]),
        OffspringDistribution::geometric(0.5).unwrap(),
        OffspringDistribution::truncated_poisson(2.0, 12).unwrap(),
    ];
    let n = 1_000_000;
    for d in laws {
        let total: u64 = (0..n).map(|_| d.sample(&mut rng)).sum();
        let se = (d.variance().finite().unwrap() / n as f64).sqrt();
        assert!((total as f64 / n as f64 - d.mean()).abs() < 4.0 * se, "{}", d.describe());
    }
    let g = OffspringDistribution::geometric(0.5).unwrap();
    let zeros = (0..n).filter(|_| g.sample(&mut rng) == 0).count();
    assert!((zeros as f64 / n as f64 - 0.5).abs() < 0.005);
}

#[test]
fn pgf_values_and_extinction() {
    assert!((pgf_eval(&law(&[0.5, 0.0, 0.5]), 0.5).unwrap() - 0.625).abs() < 1e-15);
    assert!((pgf_eval(&OffspringDistribution::geometric(0.5).unwrap(), 0.0).unwrap() - 0.5).abs() < 1e-15);
    // smaller root of 3s² - 4s + 1
    let q = (4.0 - (16.0f64 - 12.0).sqrt()) / 6.0;
    assert!((extinction_prob(&law(&[0.25, 0.0, 0.75])).unwrap() - q).abs() < 1e-12);
    for p in [vec![0.2, 0.3, 0.5], vec![0.1, 0.0, 0.0, 0.9]] {
        let d = law(&p);
        let q = extinction_prob(&d).unwrap();
        assert!((pgf_eval(&d, q).unwrap() - q).abs() < 1e-12);
    }
}

#[test]
fn second_generation_by_hand() {
    // Z_1 ∈ {0, 2}; given Z_1 = 2, Z_2 is a sum of two draws from {0, 2}
    let hand = [0.5 + 0.5 * 0.25, 0.0, 0.5 * 0.5, 0.0, 0.5 * 0.25];
    let d = law(&[0.5, 0.0, 0.5]);
    let z2 = zn_law(&d, 2, 4).unwrap();
    for (k, h) in hand.iter().enumerate() {
        assert!((z2.mass(k) - h).abs() < 1e-15);
    }
    let trees = enumerate_trees(&d, 2).unwrap();
    assert_eq!(trees.len(), 5);
    let mut from_trees = [0.0; 5];
    for (t, p) in &trees {
        from_trees[t.sizes[2] as usize] += p;
    }
    for (k, h) in hand.iter().enumerate() {
        assert!((from_trees[k] - h).abs() < 1e-15);
    }
    let mu = conditioned_law(&z2).unwrap();
    assert!((mu.mass(2) - 2.0 / 3.0).abs() < 1e-15 && (mu.mass(4) - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn series_matches_convolution_and_enumeration() {
    let laws = [
        vec![0.2, 0.5, 0.3],
        vec![0.75, 0.0, 0.25],
        vec![0.1, 0.2, 0.3, 0.4],
        vec![0.4, 0.0, 0.0, 0.6],
    ];
    for p in &laws {
        let d = law(p);
        for n in 1..=3 {
            let series = zn_law(&d, n as u32, 64).unwrap();
            let oracle = convolution_oracle(p, n, 64);
            for k in 0..=64 {
                assert!((series.mass(k) - oracle[k]).abs() < 1e-12, "{p:?} n={n} k={k}");
            }
            let trees = enumerate_trees(&d, n).unwrap();
            let mut enumerated = vec![0.0; 65];
            for (t, prob) in &trees {
                enumerated[t.sizes[n] as usize] += prob;
            }
            for k in 0..=64 {
                assert!((series.mass(k) - enumerated[k]).abs() < 1e-12);
            }
        }
    }
    let d = law(&[0.3, 0.2, 0.1, 0.1, 0.3]);
    let series = zn_law(&d, 4, 128).unwrap();
    let oracle = convolution_oracle(&[0.3, 0.2, 0.1, 0.1, 0.3], 4, 128);
    for k in 0..=128 {
        assert!((series.mass(k) - oracle[k]).abs() < 1e-12);
    }
}

#[test]
fn tv_between_conditioned_laws_matches_oracle() {
    let p = [0.75, 0.0, 0.25];
    let d = law(&p);
    let condition = |v: Vec<f64>| {
        let alive: f64 = v.iter().skip(1).sum();
        let mut masses: Vec<f64> = v.iter().map(|x| x / alive).collect();
        masses[0] = 0.0;
        TruncatedLaw::new(masses, 0.0, 0, "oracle")
    };
    let a = condition(convolution_oracle(&p, 5, 64));
    let b = condition(convolution_oracle(&p, 4, 64));
    let expected: f64 = (0..=64).map(|k| (a.mass(k) - b.mass(k)).abs()).sum::<f64>() / 2.0;
    let mu5 = conditioned_law(&zn_law(&d, 5, 64).unwrap()).unwrap();
    let mu4 = conditioned_law(&zn_law(&d, 4, 64).unwrap()).unwrap();
    let tv = tv_distance(&mu5, &mu4);
    assert!(tv > 0.0);
    assert!((tv - expected).abs() < 1e-12, "{tv} vs {expected}");
}

#[test]
fn series_agrees_with_scalar_iteration_and_means() {
    for p in [vec![0.25, 0.0, 0.75], vec![0.5, 0.0, 0.5], vec![0.6, 0.1, 0.3]] {
        let d = law(&p);
        let seq = survival_seq(&d, 20).unwrap();
        for n in 1..=20u32 {
            let z = zn_law(&d, n, 256).unwrap();
            assert!((z.mass(0) - (1.0 - seq.s[n as usize])).abs() < 1e-10);
            let total: f64 = z.masses.iter().sum::<f64>() + z.tail;
            assert!((total - 1.0).abs() < 1e-12);
            if z.tail < 1e-12 {
                let m = d.mean().powi(n as i32);
                assert!((z.mean() - m).abs() < 1e-8 * m);
            }
        }
    }
}

#[test]
fn critical_size_bias_mean_grows_linearly() {
    let d = law(&[0.5, 0.0, 0.5]);
    for n in [1u32, 2, 5, 10, 20] {
        let z = zn_law_captured(&d, n, 64).unwrap();
        let sb = size_bias_law(&z, 1.0).unwrap();
        let want = 1.0 + n as f64;
        assert!((sb.mean() - want).abs() < 1e-6 * want);
    }
}

#[test]
fn simulated_paths_match_pgf() {
    let mut rng = seeded(21);
    let reps = 100_000;
    let sup = law(&[0.25, 0.0, 0.75]);
    let dead = (0..reps)
        .filter(|_| simulate_path(&sup, 20, 1, 1 << 32, &mut rng).unwrap().extinct())
        .count();
    assert!((dead as f64 / reps as f64 - 1.0 / 3.0).abs() < 0.01);

    let crit = law(&[0.5, 0.0, 0.5]);
    let s100 = survival_seq(&crit, 100).unwrap().s[100];
    let alive = (0..reps)
        .filter(|_| !simulate_path(&crit, 100, 1, 1 << 32, &mut rng).unwrap().extinct())
        .count();
    assert!((alive as f64 / reps as f64 - s100).abs() < 0.004);
}

#[test]
fn martingale_mean_within_four_standard_errors() {
    let mut rng = seeded(5);
    let d = law(&[0.25, 0.0, 0.75]);
    let (m, v, n, reps) = (1.5f64, 0.75, 15, 100_000);
    let var_w = v * (1.0 - m.powi(-n)) / (m * m - m);
    let total: f64 = (0..reps)
        .map(|_| simulate_path(&d, n as usize, 1, 1 << 32, &mut rng).unwrap().last_w())
        .sum();
    assert!((total / reps as f64 - 1.0).abs() < 4.0 * (var_w / reps as f64).sqrt());
}

#[test]
fn simulated_trees_match_pgf() {
    let mut rng = seeded(8);
    let d = law(&[0.3, 0.3, 0.4]);
    let reps = 100_000;
    let mut counts = vec![0u64; 9];
    for _ in 0..reps {
        let t = simulate_tree(&d, 3, 10_000, &mut rng);
        counts[t.sizes[3] as usize] += 1;
    }
    let empirical = TruncatedLaw::new(
        counts.iter().map(|&c| c as f64 / reps as f64).collect(),
        0.0,
        3,
        "simulated trees",
    );
    assert!(tv_distance(&empirical, &zn_law(&d, 3, 8).unwrap()) < 0.01);
}

#[test]
fn spine_mean_tracks_variance() {
    let mut rng = seeded(13);
    let d = law(&[0.5, 0.0, 0.5]);
    let reps = 10_000;
    let total: f64 = (0..reps)
        .map(|_| simulate_spine(&d, 500, &mut rng).unwrap().z[500] as f64 / 500.0)
        .sum();
    assert!((total / reps as f64 - 1.0).abs() < 0.05);
}

#[test]
fn spine_and_direct_immigration_agree() {
    let mut rng = seeded(17);
    let d = law(&[0.5, 0.0, 0.5]);
    let imm = ImmigrationLaw::SizeBiasedMinusOne(d.size_biased().unwrap());
    let reps = 100_000;
    let mut a = vec![0u64; 64];
    let mut b = vec![0u64; 64];
    for _ in 0..reps {
        let s = spine_as_immigration(&simulate_spine(&d, 5, &mut rng).unwrap());
        a[(s.z[5] as usize).min(63)] += 1;
        let p = simulate_immigration(&d, &imm, 5, u64::MAX, &mut rng).unwrap();
        b[(p.z[5] as usize).min(63)] += 1;
    }
    let tv: f64 = a.iter().zip(&b).map(|(x, y)| (*x as f64 - *y as f64).abs()).sum::<f64>()
        / (2.0 * reps as f64);
    assert!(tv < 0.01, "{tv}");
}

#[test]
fn conditioned_sampler_acceptance_rate() {
    let mut rng = seeded(4);
    let d = law(&[0.5, 0.0, 0.5]);
    let s100 = survival_seq(&d, 100).unwrap().s[100];
    let (mut accepted, mut attempts) = (0u64, 0u64);
    while attempts < 100_000 {
        attempts += sample_conditioned(&d, 100, &mut rng).unwrap().attempts;
        accepted += 1;
    }
    assert!((accepted as f64 / attempts as f64 - s100).abs() < 0.004);
}

#[test]
fn log_pareto_tail_function() {
    // P[Y >= k] = 1/(1 + ln k)
    assert!((LogPareto::pmf(1) - (1.0 - 1.0 / (1.0 + 2f64.ln()))).abs() < 1e-15);
    let below_two = 1.0 - LogPareto::survival(2);
    let below_three = 1.0 - LogPareto::survival(3);
    assert!(below_two < 0.5 && below_three >= 0.5);
    let mut rng = seeded(6);
    let n = 100_000;
    let big = (0..n).filter(|_| LogPareto::sample_marked(&mut rng).0 >= 100).count();
    assert!((big as f64 / n as f64 - 1.0 / (1.0 + 100f64.ln())).abs() < 0.006);
}

#[test]
fn resampling_and_intervals() {
    let mut rng = seeded(9);
    let two = EmpiricalSample::new([1.0, 3.0].repeat(50)).unwrap();
    let r = size_biased_resample(&two, &mut rng, 100_000).unwrap();
    let threes = r.values().iter().filter(|&&x| x == 3.0).count() as f64 / 1e5;
    assert!((threes - 0.75).abs() < 0.01);

    let n = 100_000;
    let balanced: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.0 } else { 2.0 }).collect();
    let (m, h) = mean_ci(&balanced, 0.99).unwrap();
    assert!((m - 1.0).abs() < 1e-12);
    let z = 2.5758293035489;
    assert!((h - z / (n as f64).sqrt()).abs() < 1e-3 * h);
}
