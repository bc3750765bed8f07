//! Descriptive statistics used across the pipeline: moments, robust
//! location/scale, correlation, quantiles, histograms and autocorrelation.

use alloc::vec::Vec;

// Float-math methods for the no_std build; test builds link std and
// resolve the inherent methods instead.
#[allow(unused_imports)]
use num_traits::Float;

use crate::math;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (normalised by n, not n-1).
pub fn population_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / xs.len() as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of empty slice");
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("median: NaN in data"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Median absolute deviation (unscaled).
pub fn mad(xs: &[f64]) -> f64 {
    let m = median(xs);
    let devs: Vec<f64> = xs.iter().map(|x| (x - m).abs()).collect();
    median(&devs)
}

/// Pearson correlation; `None` when either column has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson: length mismatch");
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Linear-interpolation (type-7) quantile; `p` in [0, 1].
pub fn quantile(xs: &[f64], p: f64) -> f64 {
    assert!(!xs.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&p), "quantile: p out of range");
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("quantile: NaN in data"));
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Adjusted Fisher-Pearson sample skewness: g1 * sqrt(n(n-1)) / (n-2).
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len();
    assert!(n >= 3, "skewness needs at least 3 observations");
    let m = mean(xs);
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for x in xs {
        let d = x - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n as f64;
    m3 /= n as f64;
    if m2 <= 0.0 {
        return 0.0;
    }
    let g1 = m3 / m2.powf(1.5);
    let nf = n as f64;
    g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0)
}

/// Five-number boxplot summary with 1.5 IQR fences.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxplotSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub outliers: Vec<f64>,
}

pub fn boxplot(xs: &[f64]) -> BoxplotSummary {
    assert!(!xs.is_empty(), "boxplot of empty slice");
    let q1 = quantile(xs, 0.25);
    let q3 = quantile(xs, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let mut outliers: Vec<f64> = xs
        .iter()
        .copied()
        .filter(|&x| x < lo_fence || x > hi_fence)
        .collect();
    outliers.sort_by(|a, b| a.partial_cmp(b).expect("boxplot: NaN in data"));
    BoxplotSummary {
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        q1,
        median: quantile(xs, 0.5),
        q3,
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        outliers,
    }
}

/// One histogram bin: [lo, hi) except the last bin which is closed.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

/// Equal-width histogram normalised so the bin masses sum to 1.
pub fn histogram(xs: &[f64], bins: usize) -> Vec<HistogramBin> {
    assert!(bins > 0, "histogram needs at least one bin");
    assert!(!xs.is_empty(), "histogram of empty slice");
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = alloc::vec![0usize; bins];
    for &x in xs {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = xs.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| HistogramBin {
            lo: lo + i as f64 * width,
            hi: lo + (i + 1) as f64 * width,
            mass: c as f64 / n,
        })
        .collect()
}

/// Sample autocorrelation function at lags 0..=max_lag, normalised by the
/// lag-0 autocovariance.
pub fn acf(xs: &[f64], max_lag: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > max_lag, "acf: series shorter than max lag");
    let m = mean(xs);
    let c0: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    (0..=max_lag)
        .map(|k| {
            if c0 <= 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            let ck: f64 = (k..n).map(|t| (xs[t] - m) * (xs[t - k] - m)).sum::<f64>() / n as f64;
            ck / c0
        })
        .collect()
}

/// Ljung-Box portmanteau statistic and its chi-squared p-value
/// (degrees of freedom = number of lags tested).
pub fn ljung_box(xs: &[f64], lags: usize) -> (f64, f64) {
    let n = xs.len() as f64;
    let rho = acf(xs, lags);
    let q: f64 = (1..=lags)
        .map(|k| rho[k] * rho[k] / (n - k as f64))
        .sum::<f64>()
        * n
        * (n + 2.0);
    (q, math::chi_squared_sf(q, lags))
}
