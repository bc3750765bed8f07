//! Hannan-Rissanen two-stage regression for initial ARMA estimates: a long
//! autoregression supplies residual proxies, then the series is regressed
//! on its own lags and the lagged residuals. Only a starting point for the
//! likelihood optimizer, so failures degrade to zeros rather than erroring.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::least_squares;

pub(crate) fn initial_arma(w: &[f64], p: usize, q: usize) -> (Vec<f64>, Vec<f64>) {
    let fallback = (vec![0.0; p], vec![0.0; q]);
    if p == 0 && q == 0 {
        return fallback;
    }
    let n = w.len();
    let long_order = (n / 5).clamp(1, 20).max(p + q);
    if n < long_order + p.max(q) + 10 {
        return fallback;
    }

    // Stage 1: long AR by least squares, residuals as innovation proxies.
    let rows = n - long_order;
    let mut lag_cols: Vec<Vec<f64>> = Vec::with_capacity(long_order);
    for lag in 1..=long_order {
        lag_cols.push((0..rows).map(|t| w[t + long_order - lag]).collect());
    }
    let target: Vec<f64> = (0..rows).map(|t| w[t + long_order]).collect();
    let refs: Vec<&[f64]> = lag_cols.iter().map(|c| c.as_slice()).collect();
    let Ok(long_ar) = least_squares(&refs, &target) else {
        return fallback;
    };
    let mut eps = vec![0.0; n];
    for t in long_order..n {
        let mut pred = 0.0;
        for (lag, &coef) in long_ar.iter().enumerate() {
            pred += coef * w[t - lag - 1];
        }
        eps[t] = w[t] - pred;
    }

    // Stage 2: regress w on its own lags and lagged residual proxies.
    let start = long_order + p.max(q);
    let rows2 = n - start;
    if rows2 < p + q + 5 {
        return fallback;
    }
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p + q);
    for lag in 1..=p {
        cols.push((0..rows2).map(|t| w[t + start - lag]).collect());
    }
    for lag in 1..=q {
        cols.push((0..rows2).map(|t| eps[t + start - lag]).collect());
    }
    let target2: Vec<f64> = (0..rows2).map(|t| w[t + start]).collect();
    let refs2: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let Ok(coefs) = least_squares(&refs2, &target2) else {
        return fallback;
    };
    if coefs.iter().any(|c| !c.is_finite()) {
        return fallback;
    }
    (coefs[..p].to_vec(), coefs[p..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn recovers_rough_ar1_coefficient() {
        let mut rng = Rng::from_seed(11);
        let n = 1500;
        let mut w = vec![0.0; n];
        for t in 1..n {
            w[t] = 0.7 * w[t - 1] + rng.next_normal();
        }
        let (ar, ma) = initial_arma(&w, 1, 0);
        assert!(ma.is_empty());
        assert!((ar[0] - 0.7).abs() < 0.1, "ar estimate {}", ar[0]);
    }

    #[test]
    fn arma11_estimates_land_near_truth() {
        let mut rng = Rng::from_seed(5);
        let n = 3000;
        let (phi, theta) = (0.6, 0.3);
        let mut w = vec![0.0; n];
        let mut prev_eps = 0.0;
        for t in 1..n {
            let eps = rng.next_normal();
            w[t] = phi * w[t - 1] + eps + theta * prev_eps;
            prev_eps = eps;
        }
        let (ar, ma) = initial_arma(&w, 1, 1);
        assert!((ar[0] - phi).abs() < 0.15, "phi {}", ar[0]);
        assert!((ma[0] - theta).abs() < 0.15, "theta {}", ma[0]);
    }

    #[test]
    fn degenerate_inputs_fall_back_to_zero() {
        let (ar, ma) = initial_arma(&[1.0, 2.0, 3.0], 2, 1);
        assert_eq!(ar, vec![0.0, 0.0]);
        assert_eq!(ma, vec![0.0]);
        let constant = vec![5.0; 200];
        let (ar, _) = initial_arma(&constant, 1, 0);
        assert!(ar[0].is_finite());
    }
}
