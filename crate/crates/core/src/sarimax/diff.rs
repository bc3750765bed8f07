//! Differencing operators (1-B)^d (1-B^s)^D with exact inversion.

use alloc::vec;
use alloc::vec::Vec;

use super::SarimaxError;

#[derive(Clone, Debug, PartialEq)]
struct DiffStep {
    lag: usize,
    /// First `lag` values of the series this step consumed; exactly what
    /// inversion needs to rebuild it.
    prefix: Vec<f64>,
}

/// A differenced series together with the anchors for exact inversion.
/// Seasonal rounds apply before nonseasonal ones; `integrate` replays them
/// in reverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Differenced {
    pub values: Vec<f64>,
    steps: Vec<DiffStep>,
}

pub fn difference(series: &[f64], d: usize, dd: usize, s: usize) -> Result<Differenced, SarimaxError> {
    let depth = d + dd * s;
    if series.len() <= depth {
        return Err(SarimaxError::TooShort {
            needed: depth + 1,
            got: series.len(),
        });
    }
    let mut values = series.to_vec();
    let mut steps = Vec::with_capacity(d + dd);
    for _ in 0..dd {
        steps.push(apply_step(&mut values, s));
    }
    for _ in 0..d {
        steps.push(apply_step(&mut values, 1));
    }
    Ok(Differenced { values, steps })
}

fn apply_step(values: &mut Vec<f64>, lag: usize) -> DiffStep {
    let prefix = values[..lag].to_vec();
    let next: Vec<f64> = (lag..values.len()).map(|i| values[i] - values[i - lag]).collect();
    *values = next;
    DiffStep { lag, prefix }
}

/// Exact inverse of `difference`.
pub fn integrate(diff: &Differenced) -> Vec<f64> {
    let mut values = diff.values.clone();
    for step in diff.steps.iter().rev() {
        let mut rebuilt = Vec::with_capacity(values.len() + step.lag);
        rebuilt.extend_from_slice(&step.prefix);
        for (i, &v) in values.iter().enumerate() {
            let prev = rebuilt[i];
            rebuilt.push(v + prev);
        }
        values = rebuilt;
    }
    values
}

/// Coefficients of (1-B)^d (1-B^s)^D as a full polynomial, constant term
/// first (always 1).
pub fn delta_poly(d: usize, dd: usize, s: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    for _ in 0..d {
        poly = poly_mul(&poly, &[1.0, -1.0]);
    }
    if dd > 0 {
        let mut seasonal = vec![0.0; s + 1];
        seasonal[0] = 1.0;
        seasonal[s] = -1.0;
        for _ in 0..dd {
            poly = poly_mul(&poly, &seasonal);
        }
    }
    poly
}

pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn first_difference() {
        let d = difference(&[1.0, 2.0, 4.0], 1, 0, 1).unwrap();
        assert_eq!(d.values, vec![1.0, 2.0]);
    }

    #[test]
    fn seasonal_difference() {
        let d = difference(&[1.0, 2.0, 3.0, 4.0], 0, 1, 2).unwrap();
        assert_eq!(d.values, vec![2.0, 2.0]);
    }

    #[test]
    fn length_check() {
        assert!(matches!(
            difference(&[1.0, 2.0], 1, 1, 2),
            Err(SarimaxError::TooShort { needed: 4, got: 2 })
        ));
    }

    // Round-trip oracle: integer-valued series make float subtraction
    // exact, so inversion must be bit-for-bit.
    #[test]
    fn integrate_inverts_difference_exactly() {
        let mut rng = Rng::from_seed(1234);
        for case in 0..50 {
            let d = case % 3;
            let dd = (case / 3) % 2;
            let s = [1usize, 4, 12][(case / 6) % 3];
            let n = 40 + rng.next_below(30);
            if n <= d + dd * s {
                continue;
            }
            let series: Vec<f64> = (0..n)
                .map(|_| rng.next_below(2001) as f64 - 1000.0)
                .collect();
            let diff = difference(&series, d, dd, s).unwrap();
            assert_eq!(diff.values.len(), n - d - dd * s);
            let back = integrate(&diff);
            assert_eq!(back, series, "round trip failed for d={d} D={dd} s={s}");
        }
    }

    #[test]
    fn integrate_inverts_on_continuous_values_within_tolerance() {
        let mut rng = Rng::from_seed(77);
        let series: Vec<f64> = (0..60).map(|_| rng.next_normal()).collect();
        let diff = difference(&series, 2, 1, 4).unwrap();
        let back = integrate(&diff);
        for (a, b) in back.iter().zip(&series) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_poly_expansions() {
        assert_eq!(delta_poly(0, 0, 1), vec![1.0]);
        assert_eq!(delta_poly(1, 0, 1), vec![1.0, -1.0]);
        assert_eq!(delta_poly(2, 0, 1), vec![1.0, -2.0, 1.0]);
        assert_eq!(delta_poly(0, 1, 4), vec![1.0, 0.0, 0.0, 0.0, -1.0]);
        // (1-B)(1-B^2) = 1 - B - B^2 + B^3.
        assert_eq!(delta_poly(1, 1, 2), vec![1.0, -1.0, -1.0, 1.0]);
    }

    // The polynomial and the anchor-based implementation must agree: w_t
    // computed by convolution equals the step-by-step differencing output.
    #[test]
    fn delta_poly_matches_stepwise_differencing() {
        let mut rng = Rng::from_seed(9);
        let series: Vec<f64> = (0..50).map(|_| rng.next_normal() * 3.0).collect();
        for (d, dd, s) in [(1usize, 0usize, 1usize), (2, 0, 1), (1, 1, 4), (0, 1, 12)] {
            let diff = difference(&series, d, dd, s).unwrap();
            let poly = delta_poly(d, dd, s);
            let depth = d + dd * s;
            for (k, &w) in diff.values.iter().enumerate() {
                let t = k + depth;
                let direct: f64 = poly
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * series[t - j])
                    .sum();
                assert!((w - direct).abs() < 1e-10, "mismatch at {t}");
            }
        }
    }
}
