//! Exact t-SNE for 2-D visualisation of topic space.
//!
//! High-dimensional affinities use per-point Gaussian kernels whose
//! bandwidths are binary-searched to a target perplexity; the embedding
//! minimises KL(P || Q) against Student-t low-dimensional affinities by
//! gradient descent with momentum and an early-exaggeration phase. This is
//! the exact O(N^2) formulation; the inputs here (bucket mixtures, topic
//! rows) are small enough that tree approximations would only add error.

use alloc::vec;
use alloc::vec::Vec;

// Float-math methods for the no_std build; test builds link std and
// resolve the inherent methods instead.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Mat;
use crate::rng::Rng;

pub const DEFAULT_PERPLEXITY: f64 = 30.0;
pub const DEFAULT_ITERATIONS: usize = 1000;
const EARLY_EXAGGERATION: f64 = 12.0;
const EXAGGERATION_PHASE: usize = 250;
const MOMENTUM_SWITCH: usize = 250;
const MOMENTUM_EARLY: f64 = 0.5;
const MOMENTUM_LATE: f64 = 0.8;
const LEARNING_RATE: f64 = 200.0;
const INIT_SIGMA: f64 = 1e-4;
const SIGMA_SEARCH_ITERS: usize = 64;
const LOG_PERPLEXITY_TOL: f64 = 1e-5;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TsneError {
    #[error("need at least 3 points, got {n}")]
    TooFewPoints { n: usize },
    #[error("perplexity {perplexity} must be below the point count {n}")]
    PerplexityTooLarge { perplexity: f64, n: usize },
    #[error("non-finite gradient at iteration {iteration}")]
    NonFiniteGradient { iteration: usize },
    #[error("shape mismatch: affinity matrix is {p} points, embedding {y}")]
    ShapeMismatch { p: usize, y: usize },
}

/// Outcome of one point's bandwidth search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaFit {
    pub sigma: f64,
    pub achieved_perplexity: f64,
    pub converged: bool,
}

/// Symmetric joint affinities P with the bandwidths that produced them.
#[derive(Clone, Debug)]
pub struct AffinityMatrix {
    /// N x N joint probabilities; zero diagonal, entries sum to 1.
    pub p: Mat,
    pub perplexity: f64,
    pub sigmas: Vec<SigmaFit>,
}

#[derive(Clone, Debug)]
pub struct Embedding2D {
    /// N x 2 coordinates, recentered to zero mean.
    pub y: Mat,
    pub kl_final: f64,
    pub iterations_run: usize,
    /// KL(P||Q) sampled every 50 iterations (unexaggerated P).
    pub kl_checkpoints: Vec<(usize, f64)>,
}

fn squared_distances(x: &Mat) -> Mat {
    let n = x.rows();
    let mut d = Mat::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let dist: f64 = x
                .row(i)
                .iter()
                .zip(x.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    d
}

/// Shannon entropy (nats) and conditional row for a given precision
/// beta = 1 / (2 sigma^2). Distances are shifted by the row minimum so the
/// exponentials cannot all underflow.
fn row_entropy(dists: &[f64], skip: usize, beta: f64, out: &mut [f64]) -> f64 {
    let mut d_min = f64::INFINITY;
    for (j, &d) in dists.iter().enumerate() {
        if j != skip {
            d_min = d_min.min(d);
        }
    }
    let mut z = 0.0;
    let mut weighted = 0.0;
    for (j, &d) in dists.iter().enumerate() {
        if j == skip {
            out[j] = 0.0;
            continue;
        }
        let w = (-beta * (d - d_min)).exp();
        out[j] = w;
        z += w;
        weighted += w * (d - d_min);
    }
    for v in out.iter_mut() {
        *v /= z;
    }
    z.ln() + beta * weighted / z
}

/// Gaussian affinities with per-point bandwidths matched to `perplexity`.
pub fn pairwise_affinities(x: &Mat, perplexity: f64) -> Result<AffinityMatrix, TsneError> {
    let n = x.rows();
    if n < 3 {
        return Err(TsneError::TooFewPoints { n });
    }
    if !(perplexity < n as f64) || perplexity <= 0.0 {
        return Err(TsneError::PerplexityTooLarge { perplexity, n });
    }
    let d = squared_distances(x);
    let target = perplexity.ln();

    let mut conditional = Mat::zeros(n, n);
    let mut sigmas = Vec::with_capacity(n);
    let mut row = vec![0.0; n];
    for i in 0..n {
        let mut beta = 1.0;
        let mut beta_min = f64::NEG_INFINITY;
        let mut beta_max = f64::INFINITY;
        let mut entropy = row_entropy(d.row(i), i, beta, &mut row);
        let mut converged = false;
        for _ in 0..SIGMA_SEARCH_ITERS {
            let diff = entropy - target;
            if diff.abs() < LOG_PERPLEXITY_TOL {
                converged = true;
                break;
            }
            if diff > 0.0 {
                // Entropy too high: sharpen the kernel.
                beta_min = beta;
                beta = if beta_max.is_infinite() {
                    beta * 2.0
                } else {
                    0.5 * (beta + beta_max)
                };
            } else {
                beta_max = beta;
                beta = if beta_min.is_infinite() {
                    beta * 0.5
                } else {
                    0.5 * (beta + beta_min)
                };
            }
            entropy = row_entropy(d.row(i), i, beta, &mut row);
        }
        conditional.row_mut(i).copy_from_slice(&row);
        sigmas.push(SigmaFit {
            sigma: (0.5 / beta).sqrt(),
            achieved_perplexity: entropy.exp(),
            converged,
        });
    }

    // Symmetrized joint distribution.
    let mut p = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[(i, j)] = (conditional[(i, j)] + conditional[(j, i)]) / (2.0 * n as f64);
            }
        }
    }
    Ok(AffinityMatrix {
        p,
        perplexity,
        sigmas,
    })
}

/// Student-t kernel weights and their total (excluding the diagonal).
fn student_t_weights(y: &Mat) -> (Mat, f64) {
    let n = y.rows();
    let mut w = Mat::zeros(n, n);
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dy0 = y[(i, 0)] - y[(j, 0)];
            let dy1 = y[(i, 1)] - y[(j, 1)];
            let v = 1.0 / (1.0 + dy0 * dy0 + dy1 * dy1);
            w[(i, j)] = v;
            w[(j, i)] = v;
            total += 2.0 * v;
        }
    }
    (w, total)
}

/// KL(P || Q) with 0 log 0 = 0; Q entries are strictly positive by the
/// kernel form.
pub fn kl_divergence(p: &Mat, y: &Mat) -> f64 {
    assert_eq!(p.rows(), y.rows(), "shape mismatch");
    let (w, total) = student_t_weights(y);
    let n = p.rows();
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = p[(i, j)];
            if pij > 0.0 {
                let qij = w[(i, j)] / total;
                kl += pij * (pij / qij).ln();
            }
        }
    }
    kl
}

/// Exact gradient of KL(P || Q) with respect to the embedding:
/// dC/dy_i = 4 sum_j (P_ij - Q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2).
pub fn kl_gradient(p: &Mat, y: &Mat) -> Mat {
    assert_eq!(p.rows(), y.rows(), "shape mismatch");
    let n = p.rows();
    let (w, total) = student_t_weights(y);
    let mut grad = Mat::zeros(n, 2);
    for i in 0..n {
        let mut g0 = 0.0;
        let mut g1 = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let wij = w[(i, j)];
            let mult = (p[(i, j)] - wij / total) * wij;
            g0 += mult * (y[(i, 0)] - y[(j, 0)]);
            g1 += mult * (y[(i, 1)] - y[(j, 1)]);
        }
        grad[(i, 0)] = 4.0 * g0;
        grad[(i, 1)] = 4.0 * g1;
    }
    grad
}

fn recenter(y: &mut Mat) {
    let n = y.rows();
    for dim in 0..2 {
        let mean: f64 = (0..n).map(|i| y[(i, dim)]).sum::<f64>() / n as f64;
        for i in 0..n {
            y[(i, dim)] -= mean;
        }
    }
}

/// Runs the full t-SNE optimisation from seeded Gaussian initialisation.
pub fn tsne(
    x: &Mat,
    perplexity: f64,
    iterations: usize,
    seed: u64,
) -> Result<Embedding2D, TsneError> {
    let affinities = pairwise_affinities(x, perplexity)?;
    tsne_from_affinities(&affinities, iterations, seed)
}

/// Optimisation stage, reusable when P is precomputed.
pub fn tsne_from_affinities(
    affinities: &AffinityMatrix,
    iterations: usize,
    seed: u64,
) -> Result<Embedding2D, TsneError> {
    let p = &affinities.p;
    let n = p.rows();
    let mut rng = Rng::from_seed(seed);
    let mut y = Mat::zeros(n, 2);
    for i in 0..n {
        y[(i, 0)] = rng.next_normal() * INIT_SIGMA;
        y[(i, 1)] = rng.next_normal() * INIT_SIGMA;
    }

    let exaggeration_end = EXAGGERATION_PHASE.min(iterations);
    let mut p_active = p.clone();
    for i in 0..n {
        for j in 0..n {
            p_active[(i, j)] *= EARLY_EXAGGERATION;
        }
    }

    let mut velocity = Mat::zeros(n, 2);
    let mut kl_checkpoints = Vec::new();
    for iter in 0..iterations {
        if iter == exaggeration_end {
            p_active = p.clone();
        }
        let grad = kl_gradient(&p_active, &y);
        if grad.data().iter().any(|g| !g.is_finite()) {
            return Err(TsneError::NonFiniteGradient { iteration: iter });
        }
        let momentum = if iter < MOMENTUM_SWITCH {
            MOMENTUM_EARLY
        } else {
            MOMENTUM_LATE
        };
        for i in 0..n {
            for dim in 0..2 {
                let v = momentum * velocity[(i, dim)] - LEARNING_RATE * grad[(i, dim)];
                velocity[(i, dim)] = v;
                y[(i, dim)] += v;
            }
        }
        recenter(&mut y);
        if (iter + 1) % 50 == 0 {
            kl_checkpoints.push((iter + 1, kl_divergence(p, &y)));
        }
    }

    let kl_final = kl_divergence(p, &y);
    Ok(Embedding2D {
        y,
        kl_final,
        iterations_run: iterations,
        kl_checkpoints,
    })
}

/// Clamps a requested perplexity to what a small point set supports.
pub fn effective_perplexity(requested: f64, n: usize) -> f64 {
    let cap = ((n as f64 - 1.0) / 3.0).max(1.05);
    requested.min(cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn equilateral() -> Mat {
        // Equilateral triangle in the plane, side 1.
        Mat::from_rows(&[
            &[0.0, 0.0],
            &[1.0, 0.0],
            &[0.5, 3.0f64.sqrt() / 2.0],
        ])
    }

    #[test]
    fn equilateral_points_give_uniform_affinities() {
        let aff = pairwise_affinities(&equilateral(), 2.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.0 } else { 1.0 / 6.0 };
                assert_abs_diff_eq!(aff.p[(i, j)], want, epsilon = 1e-9);
            }
        }
        let total: f64 = aff.p.data().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn conditional_rows_normalised_and_perplexity_achieved() {
        let mut rng = Rng::from_seed(5);
        let n = 12;
        let mut x = Mat::zeros(n, 4);
        for i in 0..n {
            for f in 0..4 {
                x[(i, f)] = rng.next_normal();
            }
        }
        let aff = pairwise_affinities(&x, 4.0).unwrap();
        // Joint matrix sums to 1.
        let total: f64 = aff.p.data().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        for fit in &aff.sigmas {
            assert!(fit.converged);
            assert!((fit.achieved_perplexity - 4.0).abs() < 1e-3);
            assert!(fit.sigma > 0.0);
        }
    }

    #[test]
    fn duplicated_points_dominate_each_other() {
        let x = Mat::from_rows(&[
            &[0.0, 0.0],
            &[0.0, 0.0], // duplicate of point 0
            &[5.0, 0.0],
            &[0.0, 5.0],
            &[5.0, 5.0],
        ]);
        let aff = pairwise_affinities(&x, 1.1).unwrap();
        // Reconstruct point 0's conditional row from its fitted bandwidth:
        // the duplicate absorbs nearly all of the row mass.
        assert!(aff.sigmas[0].converged);
        let beta = 0.5 / (aff.sigmas[0].sigma * aff.sigmas[0].sigma);
        let dist = |j: usize| {
            let d0 = x[(0, 0)] - x[(j, 0)];
            let d1 = x[(0, 1)] - x[(j, 1)];
            d0 * d0 + d1 * d1
        };
        let weights: Vec<f64> = (1..5).map(|j| (-beta * dist(j)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let p_dup = weights[0] / z;
        assert!(p_dup > 0.9, "duplicate conditional mass only {p_dup}");
        for (j, &w) in weights.iter().enumerate().skip(1) {
            assert!(
                p_dup > 100.0 * (w / z),
                "point {} too heavy next to the duplicate",
                j + 1
            );
        }
        // The joint entry still ranks first in its row.
        let row_max = (2..5).map(|j| aff.p[(0, j)]).fold(0.0, f64::max);
        assert!(aff.p[(0, 1)] > row_max);
    }

    #[test]
    fn rejects_bad_configuration() {
        let x = equilateral();
        assert!(matches!(
            pairwise_affinities(&x, 3.0),
            Err(TsneError::PerplexityTooLarge { .. })
        ));
        let two = Mat::from_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(
            pairwise_affinities(&two, 1.0),
            Err(TsneError::TooFewPoints { n: 2 })
        ));
    }

    #[test]
    fn kl_zero_when_q_equals_p() {
        // Build Y, derive Q from it, and use that Q as the target P.
        let y = Mat::from_rows(&[&[0.0, 0.0], &[1.0, 0.2], &[-0.5, 0.8], &[0.3, -0.9]]);
        let (w, total) = student_t_weights(&y);
        let mut p = Mat::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    p[(i, j)] = w[(i, j)] / total;
                }
            }
        }
        assert_abs_diff_eq!(kl_divergence(&p, &y), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kl_nonnegative_and_matches_double_loop() {
        let mut rng = Rng::from_seed(9);
        let mut x = Mat::zeros(8, 3);
        for i in 0..8 {
            for f in 0..3 {
                x[(i, f)] = rng.next_normal();
            }
        }
        let aff = pairwise_affinities(&x, 2.5).unwrap();
        let mut y = Mat::zeros(8, 2);
        for i in 0..8 {
            y[(i, 0)] = rng.next_normal();
            y[(i, 1)] = rng.next_normal();
        }
        let kl = kl_divergence(&aff.p, &y);
        assert!(kl >= 0.0);

        // Brute-force recomputation.
        let mut total = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                if i == j {
                    continue;
                }
                let dy0 = y[(i, 0)] - y[(j, 0)];
                let dy1 = y[(i, 1)] - y[(j, 1)];
                total += 1.0 / (1.0 + dy0 * dy0 + dy1 * dy1);
            }
        }
        let mut direct = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                if i == j {
                    continue;
                }
                let pij = aff.p[(i, j)];
                if pij > 0.0 {
                    let dy0 = y[(i, 0)] - y[(j, 0)];
                    let dy1 = y[(i, 1)] - y[(j, 1)];
                    let q = (1.0 / (1.0 + dy0 * dy0 + dy1 * dy1)) / total;
                    direct += pij * (pij / q).ln();
                }
            }
        }
        assert_abs_diff_eq!(kl, direct, epsilon = 1e-12);
    }

    // Finite-difference oracle for the analytic gradient.
    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = Rng::from_seed(31);
        for case in 0..10 {
            let n = 6 + (case % 3);
            let mut x = Mat::zeros(n, 4);
            for i in 0..n {
                for f in 0..4 {
                    x[(i, f)] = rng.next_normal();
                }
            }
            let aff = pairwise_affinities(&x, 2.0).unwrap();
            let mut y = Mat::zeros(n, 2);
            for i in 0..n {
                y[(i, 0)] = rng.next_normal();
                y[(i, 1)] = rng.next_normal();
            }
            let grad = kl_gradient(&aff.p, &y);

            let h = 1e-5;
            let mut fd = Mat::zeros(n, 2);
            for i in 0..n {
                for dim in 0..2 {
                    let mut plus = y.clone();
                    plus[(i, dim)] += h;
                    let mut minus = y.clone();
                    minus[(i, dim)] -= h;
                    fd[(i, dim)] =
                        (kl_divergence(&aff.p, &plus) - kl_divergence(&aff.p, &minus)) / (2.0 * h);
                }
            }
            let num: f64 = grad
                .data()
                .iter()
                .zip(fd.data())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let denom: f64 = fd.data().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(
                num / denom <= 1e-4,
                "case {case}: relative gradient error {}",
                num / denom
            );
        }
    }

    #[test]
    fn kl_descends_and_is_deterministic() {
        let mut rng = Rng::from_seed(77);
        let n = 15;
        let mut x = Mat::zeros(n, 5);
        for i in 0..n {
            for f in 0..5 {
                x[(i, f)] = rng.next_normal();
            }
        }
        let aff = pairwise_affinities(&x, 4.0).unwrap();
        let initial = {
            // Same seeded initialisation as the optimiser.
            let mut r = Rng::from_seed(123);
            let mut y0 = Mat::zeros(n, 2);
            for i in 0..n {
                y0[(i, 0)] = r.next_normal() * 1e-4;
                y0[(i, 1)] = r.next_normal() * 1e-4;
            }
            kl_divergence(&aff.p, &y0)
        };
        let a = tsne_from_affinities(&aff, 400, 123).unwrap();
        assert!(a.kl_final <= initial, "KL rose: {} > {initial}", a.kl_final);

        let b = tsne_from_affinities(&aff, 400, 123).unwrap();
        assert_eq!(a.y.data(), b.y.data());

        // Monotone trend after the exaggeration phase: allow one small
        // momentum overshoot.
        let post: Vec<f64> = a
            .kl_checkpoints
            .iter()
            .filter(|(it, _)| *it >= 300)
            .map(|(_, kl)| *kl)
            .collect();
        let mut increases = 0;
        for w in post.windows(2) {
            if w[1] > w[0] + 1e-3 {
                increases += 1;
            }
        }
        assert!(increases == 0, "KL increased {increases} times after exaggeration");
    }

    #[test]
    fn two_clusters_separate() {
        let mut rng = Rng::from_seed(41);
        let n_half = 10;
        let mut x = Mat::zeros(2 * n_half, 5);
        for i in 0..2 * n_half {
            let center = if i < n_half { 3.0 } else { -3.0 };
            for f in 0..5 {
                x[(i, f)] = center + 0.3 * rng.next_normal();
            }
        }
        let emb = tsne(&x, 5.0, 500, 20).unwrap();
        let y = &emb.y;
        let dist = |i: usize, j: usize| {
            let d0 = y[(i, 0)] - y[(j, 0)];
            let d1 = y[(i, 1)] - y[(j, 1)];
            (d0 * d0 + d1 * d1).sqrt()
        };
        let mut within = 0.0;
        let mut within_n = 0.0;
        let mut between = 0.0;
        let mut between_n = 0.0;
        for i in 0..2 * n_half {
            for j in i + 1..2 * n_half {
                if (i < n_half) == (j < n_half) {
                    within += dist(i, j);
                    within_n += 1.0;
                } else {
                    between += dist(i, j);
                    between_n += 1.0;
                }
            }
        }
        assert!(
            within / within_n < between / between_n,
            "clusters failed to separate: within {} between {}",
            within / within_n,
            between / between_n
        );
    }

    #[test]
    fn effective_perplexity_clamps_small_n() {
        assert_abs_diff_eq!(effective_perplexity(30.0, 100), 30.0);
        assert_abs_diff_eq!(effective_perplexity(30.0, 10), 3.0);
        assert_abs_diff_eq!(effective_perplexity(30.0, 3), 1.05);
    }
}
