//! Shared helpers for the integration tests.
#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use l0lab::noise::ExpPolyNoise;

pub const GAUSS: [f64; 3] = [0.0, 0.0, -0.5];
pub const QUARTIC: [f64; 5] = [0.0, 0.0, 0.0, 0.0, -1.0];

pub fn gaussian() -> Arc<ExpPolyNoise> {
    static N: OnceLock<Arc<ExpPolyNoise>> = OnceLock::new();
    N.get_or_init(|| Arc::new(ExpPolyNoise::new(&GAUSS).unwrap())).clone()
}

pub fn quartic() -> Arc<ExpPolyNoise> {
    static N: OnceLock<Arc<ExpPolyNoise>> = OnceLock::new();
    N.get_or_init(|| Arc::new(ExpPolyNoise::new(&QUARTIC).unwrap())).clone()
}

/// Kolmogorov–Smirnov statistic of `xs` against `cdf`.
pub fn ks_statistic(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Critical value of the one-sample KS test at level 0.001.
pub fn ks_critical(n: usize) -> f64 {
    1.949 / (n as f64).sqrt()
}

/// CDF of `exp(-z^4) / A`, tabulated independently by a fine cumulative
/// trapezoid on [-6, 6] and linearly interpolated.
pub struct QuarticCdf {
    lo: f64,
    h: f64,
    table: Vec<f64>,
}

impl QuarticCdf {
    pub fn new() -> Self {
        let (lo, hi, n) = (-6.0, 6.0, 1_200_000usize);
        let h = (hi - lo) / n as f64;
        let f = |z: f64| (-z.powi(4)).exp();
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for i in 0..n {
            let a = lo + i as f64 * h;
            acc += 0.5 * h * (f(a) + f(a + h));
            table.push(acc);
        }
        for v in &mut table {
            *v /= acc;
        }
        QuarticCdf { lo, h, table }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let t = (z - self.lo) / self.h;
        if t <= 0.0 {
            return 0.0;
        }
        let i = t as usize;
        if i + 1 >= self.table.len() {
            return 1.0;
        }
        let w = t - i as f64;
        self.table[i] * (1.0 - w) + self.table[i + 1] * w
    }
}
