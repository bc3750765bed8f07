//! Derivative-free Nelder-Mead simplex minimisation.
//!
//! Fully deterministic: the simplex construction, the ordering rules and the
//! reflect/expand/contract/shrink steps involve no randomness, so a fit is
//! reproducible given its starting point. Restart policies belong to the
//! caller.

use alloc::vec::Vec;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    /// Stop when the simplex function-value spread falls below this.
    pub f_tol: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
    /// Step used to build the initial simplex along each coordinate.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            f_tol: 1e-8,
            max_evals: 2000,
            initial_step: 0.25,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimises `f` starting from `x0`. Non-finite objective values are treated
/// as +inf so the simplex retreats from invalid regions.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    if n == 0 {
        let fx = eval(x0, &mut evals);
        return NelderMeadResult {
            x: Vec::new(),
            f: fx,
            evals,
            converged: true,
        };
    }

    // Initial simplex: x0 plus a step along each axis.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut xi = x0.to_vec();
        xi[i] += opts.initial_step;
        let fi = eval(&xi, &mut evals);
        simplex.push((xi, fi));
    }

    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
    };
    order(&mut simplex);

    let mut converged = false;
    while evals < opts.max_evals {
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() <= opts.f_tol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = alloc::vec![0.0; n];
        for (x, _) in simplex.iter().take(n) {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }

        let worst = simplex[n].clone();
        let point_along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = point_along(REFLECT);
        let f_reflected = eval(&reflected, &mut evals);

        if f_reflected < simplex[0].1 {
            // Try expanding past the reflection.
            let expanded = point_along(EXPAND);
            let f_expanded = eval(&expanded, &mut evals);
            simplex[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < simplex[n - 1].1 {
            simplex[n] = (reflected, f_reflected);
        } else {
            let contracted = if f_reflected < worst.1 {
                point_along(CONTRACT)
            } else {
                point_along(-CONTRACT)
            };
            let f_contracted = eval(&contracted, &mut evals);
            if f_contracted < worst.1.min(f_reflected) {
                simplex[n] = (contracted, f_contracted);
            } else {
                // Shrink everything towards the best vertex.
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for (v, b) in vertex.0.iter_mut().zip(&best) {
                        *v = b + SHRINK * (*v - b);
                    }
                    vertex.1 = eval(&vertex.0, &mut evals);
                }
            }
        }
        order(&mut simplex);
    }

    NelderMeadResult {
        x: simplex[0].0.clone(),
        f: simplex[0].1,
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimises_shifted_quadratic() {
        let r = nelder_mead(
            |x| (x[0] - 3.0).powi(2) + (x[1] + 1.5).powi(2),
            &[0.0, 0.0],
            &NelderMeadOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-4, "x0 = {}", r.x[0]);
        assert!((r.x[1] + 1.5).abs() < 1e-4, "x1 = {}", r.x[1]);
    }

    #[test]
    fn minimises_rosenbrock() {
        let rosen =
            |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(
            rosen,
            &[-1.2, 1.0],
            &NelderMeadOptions {
                max_evals: 4000,
                ..Default::default()
            },
        );
        assert!(r.f < 1e-6, "f = {}", r.f);
    }

    #[test]
    fn deterministic_across_runs() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.7).powi(2)).sum::<f64>() + x[0].sin();
        let a = nelder_mead(f, &[1.0, -2.0, 0.3], &NelderMeadOptions::default());
        let b = nelder_mead(f, &[1.0, -2.0, 0.3], &NelderMeadOptions::default());
        assert_eq!(a.x, b.x);
        assert_eq!(a.evals, b.evals);
    }

    #[test]
    fn retreats_from_non_finite_regions() {
        // Objective undefined for x <= 0; optimizer must still find x = 2.
        let f = |x: &[f64]| {
            if x[0] <= 0.0 {
                f64::NAN
            } else {
                (x[0].ln() - core::f64::consts::LN_2).powi(2)
            }
        };
        let r = nelder_mead(f, &[0.5, 0.0][..1].to_vec().as_slice(), &NelderMeadOptions::default());
        assert!((r.x[0] - 2.0).abs() < 1e-3, "x = {}", r.x[0]);
    }
}
