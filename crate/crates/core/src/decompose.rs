//! Classical additive seasonal decomposition.
//!
//! trend = centered moving average over one period (half-weight endpoints
//! when the period is even), seasonal = zero-centered per-phase means of
//! the detrended series tiled across the full length, residual = the rest.
//! Trend and residual are undefined at the floor(period/2) edge positions.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("series of length {len} too short for period {period}; need at least 2x period")]
    TooShort { len: usize, period: usize },
    #[error("period must be at least 2, got {period}")]
    BadPeriod { period: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionResult {
    /// Centered moving average; `None` at the edge positions.
    pub trend: Vec<Option<f64>>,
    /// Periodic component, defined everywhere, zero mean over one period.
    pub seasonal: Vec<f64>,
    /// observed - trend - seasonal; `None` wherever trend is.
    pub residual: Vec<Option<f64>>,
    pub period: usize,
}

pub fn decompose_additive(
    series: &[f64],
    period: usize,
) -> Result<DecompositionResult, DecomposeError> {
    if period < 2 {
        return Err(DecomposeError::BadPeriod { period });
    }
    if series.len() < 2 * period {
        return Err(DecomposeError::TooShort {
            len: series.len(),
            period,
        });
    }
    let n = series.len();
    let half = period / 2;

    let mut trend: Vec<Option<f64>> = vec![None; n];
    if period % 2 == 0 {
        // Window of period+1 points with half weights on both endpoints.
        for i in half..n - half {
            let mut sum = 0.5 * series[i - half] + 0.5 * series[i + half];
            for j in i - half + 1..i + half {
                sum += series[j];
            }
            trend[i] = Some(sum / period as f64);
        }
    } else {
        for i in half..n - half {
            let sum: f64 = series[i - half..=i + half].iter().sum();
            trend[i] = Some(sum / period as f64);
        }
    }

    // Per-phase means of the detrended series over defined positions.
    let mut phase_sum = vec![0.0; period];
    let mut phase_n = vec![0usize; period];
    for i in 0..n {
        if let Some(t) = trend[i] {
            phase_sum[i % period] += series[i] - t;
            phase_n[i % period] += 1;
        }
    }
    let mut phase_mean: Vec<f64> = phase_sum
        .iter()
        .zip(&phase_n)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let grand = phase_mean.iter().sum::<f64>() / period as f64;
    for v in &mut phase_mean {
        *v -= grand;
    }

    let seasonal: Vec<f64> = (0..n).map(|i| phase_mean[i % period]).collect();
    let residual: Vec<Option<f64>> = (0..n)
        .map(|i| trend[i].map(|t| series[i] - t - seasonal[i]))
        .collect();

    Ok(DecompositionResult {
        trend,
        seasonal,
        residual,
        period,
    })
}
