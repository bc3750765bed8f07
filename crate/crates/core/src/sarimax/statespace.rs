//! Harvey state-space form of an ARMA process and the Kalman filter that
//! evaluates its exact Gaussian likelihood by prediction-error
//! decomposition.
//!
//! For ARMA(p, q) with state dimension r = max(p, q+1):
//!
//! ```text
//! y_t     = Z alpha_t,            Z = e_1
//! alpha_t = T alpha_{t-1} + R e_t
//! ```
//!
//! where T is the companion matrix (AR coefficients down the first column,
//! ones on the superdiagonal) and R = (1, theta_1, ..., theta_q, 0, ...).
//! The filter runs with unit innovation variance; sigma^2 scales out of
//! every quantity and is concentrated or supplied afterwards.

use alloc::vec;
use alloc::vec::Vec;

// Float-math methods for the no_std build; test builds link std and
// resolve the inherent methods instead.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Mat;

const MIN_PREDICTION_VARIANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub(crate) struct StateSpace {
    r: usize,
    /// AR coefficients padded to length r (first column of T).
    phi: Vec<f64>,
    /// Noise loading R = (1, theta_1, ..., theta_q, 0, ...).
    r_vec: Vec<f64>,
    rrt: Mat,
}

impl StateSpace {
    pub(crate) fn new(ar: &[f64], ma: &[f64]) -> Self {
        let p = ar.len();
        let q = ma.len();
        let r = p.max(q + 1).max(1);
        let mut phi = vec![0.0; r];
        phi[..p].copy_from_slice(ar);
        let mut r_vec = vec![0.0; r];
        r_vec[0] = 1.0;
        r_vec[1..=q].copy_from_slice(ma);
        let mut rrt = Mat::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                rrt[(i, j)] = r_vec[i] * r_vec[j];
            }
        }
        StateSpace { r, phi, r_vec, rrt }
    }

    pub(crate) fn dim(&self) -> usize {
        self.r
    }

    pub(crate) fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub(crate) fn r_vec(&self) -> &[f64] {
        &self.r_vec
    }

    /// T v exploiting the companion structure: (Tv)_i = phi_{i+1} v_0 + v_{i+1}.
    pub(crate) fn t_apply(&self, v: &[f64], out: &mut [f64]) {
        let r = self.r;
        for i in 0..r {
            let shifted = if i + 1 < r { v[i + 1] } else { 0.0 };
            out[i] = self.phi[i] * v[0] + shifted;
        }
    }

    /// T P T' in O(r^2) using the companion structure on both sides.
    fn tpt(&self, p: &Mat) -> Mat {
        let r = self.r;
        // M = T P: M[i][j] = phi_i P[0][j] + P[i+1][j].
        let mut m = Mat::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                let shifted = if i + 1 < r { p[(i + 1, j)] } else { 0.0 };
                m[(i, j)] = self.phi[i] * p[(0, j)] + shifted;
            }
        }
        // N = M T': N[i][j] = phi_j M[i][0] + M[i][j+1].
        let mut n = Mat::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                let shifted = if j + 1 < r { m[(i, j + 1)] } else { 0.0 };
                n[(i, j)] = self.phi[j] * m[(i, 0)] + shifted;
            }
        }
        n
    }

    /// One covariance prediction step: T P T' + R R'.
    pub(crate) fn advance_covariance(&self, p: &Mat) -> Mat {
        let mut next = self.tpt(p);
        for i in 0..self.r {
            for j in 0..self.r {
                next[(i, j)] += self.rrt[(i, j)];
            }
        }
        next
    }

    /// Unconditional state covariance: the fixed point of
    /// P = T P T' + R R', found by the doubling iteration. Returns `None`
    /// when the coefficients are (numerically) non-stationary.
    pub(crate) fn stationary_covariance(&self) -> Option<Mat> {
        let r = self.r;
        let mut p = self.rrt.clone();
        // A starts as T (dense copy built from the companion structure).
        let mut a = Mat::zeros(r, r);
        for i in 0..r {
            a[(i, 0)] = self.phi[i];
            if i + 1 < r {
                a[(i, i + 1)] = 1.0;
            }
        }
        for _ in 0..100 {
            // P <- P + A P A'; A <- A A.
            let apa = a.matmul(&p).matmul(&a.transpose());
            let delta = apa
                .data()
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max);
            p = p.add(&apa);
            if !delta.is_finite() {
                return None;
            }
            if delta < 1e-14 {
                // Symmetrize against accumulated rounding.
                let pt = p.transpose();
                let mut sym = p.clone();
                for i in 0..r {
                    for j in 0..r {
                        sym[(i, j)] = 0.5 * (p[(i, j)] + pt[(i, j)]);
                    }
                }
                return Some(sym);
            }
            a = a.matmul(&a);
        }
        None
    }
}

/// One filter pass over several series sharing the same state space. The
/// gain sequence depends only on the model, so the extra series cost one
/// state vector each; innovations of a linear combination of series are
/// the same linear combination of their innovations.
pub(crate) struct FilterOutput {
    /// Raw innovations v_t per series.
    pub innovations: Vec<Vec<f64>>,
    /// Unit-variance prediction variances F_t (shared across series).
    pub pred_var: Vec<f64>,
    /// Sum of ln F_t.
    pub sum_ln_f: f64,
    /// Prior state mean of each series at every step (Z a_{t|t-1}).
    pub prior_means: Vec<Vec<f64>>,
    /// Final prior state vector per series (a_{n+1|n}).
    pub final_states: Vec<Vec<f64>>,
    /// Final prior covariance (P_{n+1|n}).
    pub final_cov: Mat,
}

pub(crate) fn kalman_filter_multi(ss: &StateSpace, series: &[&[f64]]) -> Option<FilterOutput> {
    let r = ss.dim();
    let n = series.first().map_or(0, |s| s.len());
    debug_assert!(series.iter().all(|s| s.len() == n));
    let k = series.len();

    let mut p = ss.stationary_covariance()?;
    let mut states: Vec<Vec<f64>> = vec![vec![0.0; r]; k];
    let mut innovations: Vec<Vec<f64>> = vec![Vec::with_capacity(n); k];
    let mut prior_means: Vec<Vec<f64>> = vec![Vec::with_capacity(n); k];
    let mut pred_var = Vec::with_capacity(n);
    let mut sum_ln_f = 0.0;

    let mut tpz = vec![0.0; r];
    let mut scratch = vec![0.0; r];
    for t in 0..n {
        let f = p[(0, 0)];
        if !f.is_finite() || f < MIN_PREDICTION_VARIANCE {
            return None;
        }
        pred_var.push(f);
        sum_ln_f += f.ln();

        // Gain direction: T P Z' (column 0 of T P).
        for i in 0..r {
            let shifted = if i + 1 < r { p[(i + 1, 0)] } else { 0.0 };
            tpz[i] = ss.phi[i] * p[(0, 0)] + shifted;
        }

        for (series_idx, data) in series.iter().enumerate() {
            let a = &mut states[series_idx];
            let prior = a[0];
            prior_means[series_idx].push(prior);
            let v = data[t] - prior;
            innovations[series_idx].push(v);
            // a <- T a + (TPZ'/F) v.
            ss.t_apply(a, &mut scratch);
            for i in 0..r {
                a[i] = scratch[i] + tpz[i] * v / f;
            }
        }

        // P <- T P T' + R R' - (TPZ')(TPZ')'/F, symmetrized.
        let mut next = ss.tpt(&p);
        for i in 0..r {
            for j in 0..r {
                next[(i, j)] += ss.rrt[(i, j)] - tpz[i] * tpz[j] / f;
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                let avg = 0.5 * (next[(i, j)] + next[(j, i)]);
                next[(i, j)] = avg;
                next[(j, i)] = avg;
            }
        }
        p = next;
    }

    Some(FilterOutput {
        innovations,
        pred_var,
        sum_ln_f,
        prior_means,
        final_states: states,
        final_cov: p,
    })
}

/// Exact Gaussian log-likelihood of `data` under the ARMA model with the
/// given innovation variance.
pub(crate) fn exact_loglik_arma(ss: &StateSpace, data: &[f64], sigma2: f64) -> Option<f64> {
    let out = kalman_filter_multi(ss, &[data])?;
    let n = data.len() as f64;
    let mut ssq = 0.0;
    for (v, f) in out.innovations[0].iter().zip(&out.pred_var) {
        ssq += v * v / f;
    }
    Some(
        -0.5 * n * (2.0 * core::f64::consts::PI * sigma2).ln() - 0.5 * out.sum_ln_f
            - 0.5 * ssq / sigma2,
    )
}
