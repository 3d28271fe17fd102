//! Quadrature helpers for sums over very long integer ranges.
//!
//! Heavy-tailed offspring laws are supported on `{2, ..., K}` with `K` up to
//! `2^60`. Sums over the far part of such a range are evaluated with the
//! Euler-Maclaurin formula, whose integral term is computed by composite
//! Gauss-Legendre quadrature in `u = ln x`.

use std::sync::OnceLock;

const GL_ORDER: usize = 16;
const PANEL_WIDTH: f64 = 0.25;

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        (nodes, weights)
    })
}

/// `∫_a^b f(x) dx` for `1 < a <= b`, integrated in `u = ln x`.
pub fn log_space_integral(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre();
    let (ua, ub) = (a.ln(), b.ln());
    let panels = ((ub - ua) / PANEL_WIDTH).ceil().max(1.0) as usize;
    let h = (ub - ua) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = ua + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut acc = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            let u = mid + 0.5 * h * t;
            let x = u.exp();
            acc += w * f(x) * x;
        }
        total += 0.5 * h * acc;
    }
    total
}

/// `Σ_{k=a}^{b} f(k)` by Euler-Maclaurin with two correction terms.
///
/// `df` is the derivative of `f`. Accurate when `f` is smooth and slowly
/// varying on the scale of one unit, which holds for `a` in the tens of
/// thousands for every summand used here.
pub fn euler_maclaurin_sum(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    a: u64,
    b: u64,
) -> f64 {
    if b < a {
        return 0.0;
    }
    let (fa, fb) = (a as f64, b as f64);
    if a == b {
        return f(fa);
    }
    log_space_integral(&f, fa, fb) + 0.5 * (f(fa) + f(fb)) + (df(fb) - df(fa)) / 12.0
}
