//! Monahan's bijection between unconstrained reals and stationary AR
//! coefficients, via partial autocorrelations and the Levinson-Durbin
//! recursion. The same map yields invertible MA coefficients (sign
//! flipped, since the MA polynomial is 1 + theta_1 B + ...).

use alloc::vec::Vec;

// Float-math methods for the no_std build; test builds link std and
// resolve the inherent methods instead.
#[allow(unused_imports)]
use num_traits::Float;

const PACF_CLAMP: f64 = 0.9999;

/// Unconstrained -> partial autocorrelations in (-1, 1).
fn squash(u: f64) -> f64 {
    u / (1.0 + u * u).sqrt()
}

fn unsquash(r: f64) -> f64 {
    let r = r.clamp(-PACF_CLAMP, PACF_CLAMP);
    r / (1.0 - r * r).sqrt()
}

/// Maps unconstrained parameters to AR coefficients phi (of
/// 1 - phi_1 B - ... - phi_p B^p) whose roots lie outside the unit circle.
pub fn to_stationary_ar(unconstrained: &[f64]) -> Vec<f64> {
    let p = unconstrained.len();
    let mut coeffs: Vec<f64> = unconstrained.iter().map(|&u| squash(u)).collect();
    // Levinson-Durbin: grow the order one lag at a time.
    for k in 1..p {
        let rho = coeffs[k];
        let prev = coeffs[..k].to_vec();
        for i in 0..k {
            coeffs[i] = prev[i] - rho * prev[k - 1 - i];
        }
    }
    coeffs
}

/// Inverse of `to_stationary_ar`; clamps partial autocorrelations that sit
/// on or outside the boundary (useful for rough initial estimates).
pub fn from_stationary_ar(phi: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let mut work = phi.to_vec();
    let mut pacf = alloc::vec![0.0; p];
    for k in (1..=p).rev() {
        let rho = work[k - 1].clamp(-PACF_CLAMP, PACF_CLAMP);
        pacf[k - 1] = rho;
        if k > 1 {
            let prev = work[..k - 1].to_vec();
            let denom = 1.0 - rho * rho;
            for i in 0..k - 1 {
                work[i] = (prev[i] + rho * prev[k - 2 - i]) / denom;
            }
        }
    }
    pacf.into_iter().map(unsquash).collect()
}

/// Invertible MA coefficients theta (of 1 + theta_1 B + ...).
pub fn to_invertible_ma(unconstrained: &[f64]) -> Vec<f64> {
    to_stationary_ar(unconstrained).into_iter().map(|c| -c).collect()
}

pub fn from_invertible_ma(theta: &[f64]) -> Vec<f64> {
    let flipped: Vec<f64> = theta.iter().map(|&t| -t).collect();
    from_stationary_ar(&flipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use approx::assert_abs_diff_eq;

    /// Durand-Kerner root finder over a tiny complex type: the independent
    /// oracle for the stationarity guarantee.
    #[derive(Clone, Copy)]
    struct C {
        re: f64,
        im: f64,
    }
    impl C {
        fn mul(self, o: C) -> C {
            C {
                re: self.re * o.re - self.im * o.im,
                im: self.re * o.im + self.im * o.re,
            }
        }
        fn sub(self, o: C) -> C {
            C {
                re: self.re - o.re,
                im: self.im - o.im,
            }
        }
        fn div(self, o: C) -> C {
            let d = o.re * o.re + o.im * o.im;
            C {
                re: (self.re * o.re + self.im * o.im) / d,
                im: (self.im * o.re - self.re * o.im) / d,
            }
        }
        fn abs(self) -> f64 {
            (self.re * self.re + self.im * self.im).sqrt()
        }
    }

    /// Roots of c_0 + c_1 z + ... + c_n z^n.
    fn roots(coeffs: &[f64]) -> Vec<C> {
        let n = coeffs.len() - 1;
        if n == 0 {
            return Vec::new();
        }
        let lead = coeffs[n];
        let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
        let mut zs: Vec<C> = (0..n)
            .map(|k| {
                let angle = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.35;
                C {
                    re: 1.3 * angle.cos(),
                    im: 1.3 * angle.sin(),
                }
            })
            .collect();
        for _ in 0..200 {
            let mut max_step = 0.0f64;
            for i in 0..n {
                let mut num = C { re: monic[n], im: 0.0 };
                // Horner evaluation of the monic polynomial at zs[i].
                for k in (0..n).rev() {
                    num = num.mul(zs[i]);
                    num.re += monic[k];
                }
                let mut den = C { re: 1.0, im: 0.0 };
                for j in 0..n {
                    if j != i {
                        den = den.mul(zs[i].sub(zs[j]));
                    }
                }
                let step = num.div(den);
                zs[i] = zs[i].sub(step);
                max_step = max_step.max(step.abs());
            }
            if max_step < 1e-12 {
                break;
            }
        }
        zs
    }

    #[test]
    fn transform_always_yields_stationary_roots() {
        let mut rng = Rng::from_seed(2024);
        for _ in 0..1000 {
            let p = 1 + rng.next_below(4);
            let u: Vec<f64> = (0..p).map(|_| rng.next_normal() * 3.0).collect();
            let phi = to_stationary_ar(&u);
            // AR polynomial 1 - phi_1 z - ... - phi_p z^p.
            let mut coeffs = alloc::vec![1.0];
            coeffs.extend(phi.iter().map(|&c| -c));
            for root in roots(&coeffs) {
                assert!(
                    root.abs() > 1.0 + 1e-9,
                    "root inside unit circle for u = {u:?}"
                );
            }
        }
    }

    #[test]
    fn ma_transform_yields_invertible_roots() {
        let mut rng = Rng::from_seed(7);
        for _ in 0..200 {
            let q = 1 + rng.next_below(3);
            let u: Vec<f64> = (0..q).map(|_| rng.next_normal() * 2.0).collect();
            let theta = to_invertible_ma(&u);
            let mut coeffs = alloc::vec![1.0];
            coeffs.extend(theta.iter().copied());
            for root in roots(&coeffs) {
                assert!(root.abs() > 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn round_trip_through_pacf() {
        let mut rng = Rng::from_seed(99);
        for _ in 0..100 {
            let p = 1 + rng.next_below(4);
            let u: Vec<f64> = (0..p).map(|_| rng.next_normal()).collect();
            let phi = to_stationary_ar(&u);
            let back = from_stationary_ar(&phi);
            for (a, b) in u.iter().zip(&back) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
            let theta = to_invertible_ma(&u);
            let back_ma = from_invertible_ma(&theta);
            for (a, b) in u.iter().zip(&back_ma) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn ar1_map_is_a_single_squash() {
        assert_abs_diff_eq!(to_stationary_ar(&[0.0])[0], 0.0);
        let phi = to_stationary_ar(&[1.0])[0];
        assert_abs_diff_eq!(phi, 1.0 / 2.0f64.sqrt(), epsilon = 1e-12);
        assert!(to_stationary_ar(&[1e6])[0] < 1.0);
    }
}
