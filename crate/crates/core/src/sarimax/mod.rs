//! Seasonal ARIMA with exogenous regressors: exact-likelihood estimation,
//! order selection by AIC, one-step prediction, multi-step forecasting and
//! residual diagnostics.
//!
//! The model is a regression with SARIMA errors. Differencing is applied
//! to the endogenous series and every regressor up front, so the filtered
//! state is always stationary and the initial covariance comes from the
//! discrete Lyapunov equation. For fixed ARMA coefficients the regression
//! coefficients and innovation variance have closed-form GLS solutions
//! through the Kalman innovations, leaving the Nelder-Mead simplex a
//! problem of only p+q+P+Q dimensions in an unconstrained parameterization
//! that is stationary and invertible by construction.

pub mod constrain;
pub mod diff;
mod hannan;
mod statespace;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

// Float-math methods for the no_std build; test builds link std and
// resolve the inherent methods instead.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{least_squares, Mat};
use crate::math::normal_quantile;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::rng::Rng;
use crate::stats;

use diff::{delta_poly, difference, poly_mul};
use statespace::{kalman_filter_multi, StateSpace};

/// Fixed stream for the optimizer's jittered restarts; fits are functions
/// of their inputs alone.
const RESTART_SEED: u64 = 0x7a1d_e5ca_1e5e_ed01;
const N_RESTARTS: usize = 3;
const Z_95: f64 = 1.959963984540054;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SarimaxError {
    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("input contains non-finite values")]
    NonFiniteInput,
    #[error("exogenous shape mismatch: expected {expected}, got {got}")]
    ExogMismatch { expected: usize, got: usize },
    #[error("rank-deficient regression; collinear columns: {}", columns.join(", "))]
    Collinear { columns: Vec<String> },
    #[error("fit failed for order {order}: {detail}")]
    FitFailed { order: String, detail: String },
    #[error("forecast needs exactly {needed} future exogenous rows, got {got}")]
    MissingFutureExog { needed: usize, got: usize },
    #[error("diagnostics need at least {needed} residuals, got {got}")]
    InsufficientResiduals { needed: usize, got: usize },
    #[error("residuals have zero variance; cannot standardize")]
    ZeroVarianceResiduals,
    #[error("every grid candidate failed; first failure {}: {}", failures[0].0, failures[0].1)]
    AllCandidatesFailed { failures: Vec<(String, String)> },
}

/// SARIMA(p,d,q)(P,D,Q,s) order. `s = 1` means no seasonal structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    /// Seasonal AR order.
    pub sp: usize,
    /// Seasonal differencing order.
    pub sd: usize,
    /// Seasonal MA order.
    pub sq: usize,
    pub s: usize,
}

impl OrderSpec {
    pub fn nonseasonal(p: usize, d: usize, q: usize) -> Self {
        OrderSpec {
            p,
            d,
            q,
            sp: 0,
            sd: 0,
            sq: 0,
            s: 1,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn seasonal(p: usize, d: usize, q: usize, sp: usize, sd: usize, sq: usize, s: usize) -> Self {
        OrderSpec {
            p,
            d,
            q,
            sp,
            sd,
            sq,
            s,
        }
    }

    pub fn label(&self) -> String {
        format!(
            "({},{},{})({},{},{},{})",
            self.p, self.d, self.q, self.sp, self.sd, self.sq, self.s
        )
    }

    /// Parameter count entering the AIC: ARMA coefficients, exogenous
    /// coefficients, intercept, innovation variance.
    pub fn param_count(&self, n_exog: usize) -> usize {
        self.p + self.q + self.sp + self.sq + n_exog + 2
    }

    /// Depth of the differencing operator: d + D*s.
    fn diff_depth(&self) -> usize {
        self.d + self.sd * self.s
    }

    fn validate(&self, n_obs: usize) -> Result<(), SarimaxError> {
        if self.s == 0 {
            return Err(SarimaxError::InvalidOrder(
                "seasonal period s must be at least 1".into(),
            ));
        }
        if self.s < 2 && (self.sp > 0 || self.sd > 0 || self.sq > 0) {
            return Err(SarimaxError::InvalidOrder(
                "seasonal terms require a seasonal period of at least 2".into(),
            ));
        }
        if self.diff_depth() >= n_obs {
            return Err(SarimaxError::InvalidOrder(format!(
                "differencing depth {} not below series length {}",
                self.diff_depth(),
                n_obs
            )));
        }
        Ok(())
    }
}

/// Fitted parameters. AR polynomials are 1 - phi_1 B - ...; MA polynomials
/// are 1 + theta_1 B + ....
#[derive(Clone, Debug, PartialEq)]
pub struct SarimaxParams {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub sar: Vec<f64>,
    pub sma: Vec<f64>,
    pub beta_exog: Vec<f64>,
    pub intercept: f64,
    pub sigma2: f64,
}

impl SarimaxParams {
    /// Pure-ARMA parameter set, convenient for oracles and simulation.
    pub fn arma(ar: Vec<f64>, ma: Vec<f64>, sigma2: f64) -> Self {
        SarimaxParams {
            ar,
            ma,
            sar: Vec::new(),
            sma: Vec::new(),
            beta_exog: Vec::new(),
            intercept: 0.0,
            sigma2,
        }
    }
}

/// Named exogenous regressor columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Exog {
    names: Vec<String>,
    cols: Vec<Vec<f64>>,
}

impl Exog {
    pub fn empty() -> Self {
        Exog::default()
    }

    pub fn new(names: Vec<String>, cols: Vec<Vec<f64>>) -> Self {
        assert_eq!(names.len(), cols.len(), "one name per column");
        let mut lens = cols.iter().map(Vec::len);
        if let Some(first) = lens.next() {
            assert!(lens.all(|l| l == first), "ragged exogenous columns");
        }
        Exog { names, cols }
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn n_rows(&self) -> usize {
        self.cols.first().map_or(0, Vec::len)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cols(&self) -> &[Vec<f64>] {
        &self.cols
    }

    /// Row range as a new table (for train/test splits).
    pub fn slice_rows(&self, range: core::ops::Range<usize>) -> Exog {
        Exog {
            names: self.names.clone(),
            cols: self.cols.iter().map(|c| c[range.clone()].to_vec()).collect(),
        }
    }
}

/// Everything `forecast` needs beyond the parameters.
#[derive(Clone, Debug, PartialEq)]
struct ForecastContext {
    final_state: Vec<f64>,
    final_cov: Mat,
    endog_tail: Vec<f64>,
    exog_tails: Vec<Vec<f64>>,
    delta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SarimaxFit {
    pub order: OrderSpec,
    pub params: SarimaxParams,
    pub exog_names: Vec<String>,
    pub loglik: f64,
    pub aic: f64,
    /// One-step standardized innovations of the differenced model.
    pub residuals: Vec<f64>,
    pub n_obs_effective: usize,
    pub converged: bool,
    context: ForecastContext,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForecastResult {
    pub horizon: usize,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub interval_95: Vec<(f64, f64)>,
}

/// One-step-ahead predictions aligned with the input series; entries are
/// `None` where the differencing depth leaves no usable history.
#[derive(Clone, Debug, PartialEq)]
pub struct OneStepPredictions {
    pub predicted: Vec<Option<f64>>,
    pub residuals: Vec<Option<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub split_ratio: f64,
    pub rmse_train: f64,
    pub rmse_test: f64,
}

/// `evaluate` output: the report plus the artifacts it was computed from.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub report: EvalReport,
    pub fit: SarimaxFit,
    pub predictions: OneStepPredictions,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticReport {
    pub standardized: Vec<f64>,
    pub histogram: Vec<stats::HistogramBin>,
    /// Mean and standard deviation for the normal overlay.
    pub overlay_mean: f64,
    pub overlay_std: f64,
    /// (theoretical, sample) quantile pairs, Blom plotting positions.
    pub qq: Vec<(f64, f64)>,
    /// Residual autocorrelations at lags 0..=40 (capped by the sample).
    pub acf: Vec<f64>,
    pub acf_band: f64,
    pub ljung_box_stat: f64,
    pub ljung_box_pvalue: f64,
}

#[derive(Clone, Debug)]
pub struct GridEntry {
    pub order: OrderSpec,
    pub aic: Option<f64>,
    pub loglik: Option<f64>,
    pub converged: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct GridSearchResult {
    pub best: SarimaxFit,
    pub table: Vec<GridEntry>,
}

/// Grid bounds, inclusive, for (p, q, P, Q).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridRanges {
    pub max_p: usize,
    pub max_q: usize,
    pub max_sp: usize,
    pub max_sq: usize,
}

impl Default for GridRanges {
    fn default() -> Self {
        GridRanges {
            max_p: 2,
            max_q: 2,
            max_sp: 2,
            max_sq: 2,
        }
    }
}

/// Square root of the mean squared error.
pub fn rmse(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return 0.0;
    }
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}

// ---------------------------------------------------------------------
// Shared preparation: differencing plus regression columns.
// ---------------------------------------------------------------------

struct Prepared {
    w_y: Vec<f64>,
    /// Constant column followed by the differenced exogenous columns.
    reg_cols: Vec<Vec<f64>>,
    delta: Vec<f64>,
    n_eff: usize,
}

fn prepare(endog: &[f64], exog: &Exog, order: &OrderSpec) -> Result<Prepared, SarimaxError> {
    order.validate(endog.len())?;
    if endog.iter().any(|v| !v.is_finite()) {
        return Err(SarimaxError::NonFiniteInput);
    }
    if exog.n_cols() > 0 {
        if exog.n_rows() != endog.len() {
            return Err(SarimaxError::ExogMismatch {
                expected: endog.len(),
                got: exog.n_rows(),
            });
        }
        if exog.cols().iter().flatten().any(|v| !v.is_finite()) {
            return Err(SarimaxError::NonFiniteInput);
        }
    }
    let w_y = difference(endog, order.d, order.sd, order.s)?.values;
    let n_eff = w_y.len();
    let needed = order.p + order.q + (order.sp + order.sq) * order.s + exog.n_cols() + 2;
    if n_eff < needed.max(4) {
        return Err(SarimaxError::TooShort {
            needed: needed.max(4) + order.diff_depth(),
            got: endog.len(),
        });
    }
    let mut reg_cols = vec![vec![1.0; n_eff]];
    for col in exog.cols() {
        reg_cols.push(difference(col, order.d, order.sd, order.s)?.values);
    }
    Ok(Prepared {
        w_y,
        reg_cols,
        delta: delta_poly(order.d, order.sd, order.s),
        n_eff,
    })
}

/// Expands the multiplicative seasonal polynomials into plain ARMA
/// coefficient vectors for the state space.
fn expand_polynomials(params: &SarimaxParams, s: usize) -> (Vec<f64>, Vec<f64>) {
    let mut ar_poly = vec![1.0];
    ar_poly.extend(params.ar.iter().map(|&c| -c));
    let mut sar_poly = vec![0.0; params.sar.len() * s + 1];
    sar_poly[0] = 1.0;
    for (j, &c) in params.sar.iter().enumerate() {
        sar_poly[(j + 1) * s] = -c;
    }
    let full_ar = poly_mul(&ar_poly, &sar_poly);

    let mut ma_poly = vec![1.0];
    ma_poly.extend(params.ma.iter().copied());
    let mut sma_poly = vec![0.0; params.sma.len() * s + 1];
    sma_poly[0] = 1.0;
    for (j, &c) in params.sma.iter().enumerate() {
        sma_poly[(j + 1) * s] = c;
    }
    let full_ma = poly_mul(&ma_poly, &sma_poly);

    let phi: Vec<f64> = full_ar[1..].iter().map(|&c| -c).collect();
    let theta: Vec<f64> = full_ma[1..].to_vec();
    (phi, theta)
}

fn params_from_unconstrained(u: &[f64], order: &OrderSpec) -> SarimaxParams {
    let (p, q, sp, sq) = (order.p, order.q, order.sp, order.sq);
    debug_assert_eq!(u.len(), p + q + sp + sq);
    SarimaxParams {
        ar: constrain::to_stationary_ar(&u[..p]),
        ma: constrain::to_invertible_ma(&u[p..p + q]),
        sar: constrain::to_stationary_ar(&u[p + q..p + q + sp]),
        sma: constrain::to_invertible_ma(&u[p + q + sp..p + q + sp + sq]),
        beta_exog: Vec::new(),
        intercept: 0.0,
        sigma2: 1.0,
    }
}

enum GlsFailure {
    Numeric,
    Collinear(Vec<usize>),
}

struct GlsEval {
    gamma: Vec<f64>,
    sigma2: f64,
    concentrated_loglik: f64,
    /// Innovations of w - Z gamma, unit-variance filter scale.
    innovations: Vec<f64>,
    pred_var: Vec<f64>,
    final_state: Vec<f64>,
    final_cov: Mat,
}

/// Filters the endogenous series and every regression column through the
/// ARMA innovation model, solves the GLS regression in innovation space
/// and concentrates the variance out of the likelihood.
fn gls_evaluate(prepared: &Prepared, phi: &[f64], theta: &[f64]) -> Result<GlsEval, GlsFailure> {
    let ss = StateSpace::new(phi, theta);
    let mut series: Vec<&[f64]> = Vec::with_capacity(1 + prepared.reg_cols.len());
    series.push(&prepared.w_y);
    for col in &prepared.reg_cols {
        series.push(col);
    }
    let out = kalman_filter_multi(&ss, &series).ok_or(GlsFailure::Numeric)?;
    let n = prepared.n_eff;
    let k = prepared.reg_cols.len();

    // Standardize innovations by sqrt(F) and regress.
    let sqrt_f: Vec<f64> = out.pred_var.iter().map(|f| f.sqrt()).collect();
    let y_std: Vec<f64> = out.innovations[0]
        .iter()
        .zip(&sqrt_f)
        .map(|(v, s)| v / s)
        .collect();
    let x_std: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            out.innovations[j + 1]
                .iter()
                .zip(&sqrt_f)
                .map(|(v, s)| v / s)
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = x_std.iter().map(|c| c.as_slice()).collect();
    let gamma = least_squares(&refs, &y_std).map_err(GlsFailure::Collinear)?;

    let mut ssq = 0.0;
    let mut innovations = Vec::with_capacity(n);
    for t in 0..n {
        let mut v = out.innovations[0][t];
        for (j, g) in gamma.iter().enumerate() {
            v -= g * out.innovations[j + 1][t];
        }
        innovations.push(v);
        ssq += v * v / out.pred_var[t];
    }
    let sigma2 = ssq / n as f64;
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(GlsFailure::Numeric);
    }
    let nf = n as f64;
    let concentrated_loglik = -0.5 * nf * ((2.0 * core::f64::consts::PI).ln() + 1.0 + sigma2.ln())
        - 0.5 * out.sum_ln_f;
    if !concentrated_loglik.is_finite() {
        return Err(GlsFailure::Numeric);
    }

    // State of w - Z gamma by linearity of the filter.
    let r = ss.dim();
    let mut final_state = out.final_states[0].clone();
    for (j, g) in gamma.iter().enumerate() {
        for i in 0..r {
            final_state[i] -= g * out.final_states[j + 1][i];
        }
    }
    Ok(GlsEval {
        gamma,
        sigma2,
        concentrated_loglik,
        innovations,
        pred_var: out.pred_var,
        final_state,
        final_cov: out.final_cov,
    })
}

fn collinear_error(indices: &[usize], exog: &Exog) -> SarimaxError {
    let columns = indices
        .iter()
        .map(|&i| {
            if i == 0 {
                "intercept".to_string()
            } else {
                exog.names()
                    .get(i - 1)
                    .cloned()
                    .unwrap_or_else(|| format!("exog[{}]", i - 1))
            }
        })
        .collect();
    SarimaxError::Collinear { columns }
}

/// Fits the model by exact maximum likelihood.
pub fn fit(endog: &[f64], exog: &Exog, order: &OrderSpec) -> Result<SarimaxFit, SarimaxError> {
    let prepared = prepare(endog, exog, order)?;
    let dim = order.p + order.q + order.sp + order.sq;

    // Initial point: plain OLS detrend, then Hannan-Rissanen on the
    // residuals for the nonseasonal block; seasonal blocks start at zero.
    let refs: Vec<&[f64]> = prepared.reg_cols.iter().map(|c| c.as_slice()).collect();
    let gamma0 =
        least_squares(&refs, &prepared.w_y).map_err(|idx| collinear_error(&idx, exog))?;
    let detrended: Vec<f64> = (0..prepared.n_eff)
        .map(|t| {
            let mut v = prepared.w_y[t];
            for (j, g) in gamma0.iter().enumerate() {
                v -= g * prepared.reg_cols[j][t];
            }
            v
        })
        .collect();
    let (ar0, ma0) = hannan::initial_arma(&detrended, order.p, order.q);
    let mut u0 = Vec::with_capacity(dim);
    u0.extend(constrain::from_stationary_ar(&ar0));
    u0.extend(constrain::from_invertible_ma(&ma0));
    u0.extend(core::iter::repeat_n(0.0, order.sp + order.sq));
    if u0.iter().any(|v| !v.is_finite()) {
        u0 = vec![0.0; dim];
    }

    let objective = |u: &[f64]| -> f64 {
        let params = params_from_unconstrained(u, order);
        let (phi, theta) = expand_polynomials(&params, order.s);
        match gls_evaluate(&prepared, &phi, &theta) {
            Ok(eval) => -eval.concentrated_loglik,
            Err(_) => f64::INFINITY,
        }
    };

    let mut best_u = u0.clone();
    let mut best_f = f64::INFINITY;
    let mut best_converged = false;
    if dim == 0 {
        best_f = objective(&best_u);
        best_converged = true;
    } else {
        let rng = Rng::from_seed(RESTART_SEED);
        for restart in 0..N_RESTARTS {
            let start: Vec<f64> = if restart == 0 {
                u0.clone()
            } else {
                let mut r = rng.split(restart as u64);
                u0.iter().map(|v| v + 0.5 * r.next_normal()).collect()
            };
            let result = nelder_mead(objective, &start, &NelderMeadOptions::default());
            if result.f < best_f {
                best_f = result.f;
                best_u = result.x;
                best_converged = result.converged;
            }
        }
    }
    if !best_f.is_finite() {
        return Err(SarimaxError::FitFailed {
            order: order.label(),
            detail: "non-finite likelihood at every restart".into(),
        });
    }

    let mut params = params_from_unconstrained(&best_u, order);
    let (phi, theta) = expand_polynomials(&params, order.s);
    let eval = match gls_evaluate(&prepared, &phi, &theta) {
        Ok(e) => e,
        Err(GlsFailure::Collinear(idx)) => return Err(collinear_error(&idx, exog)),
        Err(GlsFailure::Numeric) => {
            return Err(SarimaxError::FitFailed {
                order: order.label(),
                detail: "numeric failure at the optimum".into(),
            })
        }
    };
    params.intercept = eval.gamma[0];
    params.beta_exog = eval.gamma[1..].to_vec();
    params.sigma2 = eval.sigma2;

    // Exact log-likelihood at the estimate (equals the concentrated value
    // at the optimum).
    let nf = prepared.n_eff as f64;
    let sum_ln_f: f64 = eval.pred_var.iter().map(|f| f.ln()).sum();
    let ssq: f64 = eval
        .innovations
        .iter()
        .zip(&eval.pred_var)
        .map(|(v, f)| v * v / f)
        .sum();
    let loglik = -0.5 * nf * (2.0 * core::f64::consts::PI * params.sigma2).ln()
        - 0.5 * sum_ln_f
        - 0.5 * ssq / params.sigma2;
    let k = order.param_count(exog.n_cols());
    let aic = 2.0 * k as f64 - 2.0 * loglik;

    let residuals: Vec<f64> = eval
        .innovations
        .iter()
        .zip(&eval.pred_var)
        .map(|(v, f)| v / (params.sigma2 * f).sqrt())
        .collect();

    let depth = order.diff_depth();
    let context = ForecastContext {
        final_state: eval.final_state,
        final_cov: eval.final_cov,
        endog_tail: endog[endog.len() - depth..].to_vec(),
        exog_tails: exog
            .cols()
            .iter()
            .map(|c| c[c.len() - depth..].to_vec())
            .collect(),
        delta: prepared.delta.clone(),
    };

    Ok(SarimaxFit {
        order: *order,
        params,
        exog_names: exog.names().to_vec(),
        loglik,
        aic,
        residuals,
        n_obs_effective: prepared.n_eff,
        converged: best_converged,
        context,
    })
}

/// AIC-minimizing exhaustive search over (p, q, P, Q) with fixed
/// differencing. Converged fits are preferred; ties go to the
/// lexicographically smallest order.
pub fn grid_search(
    endog: &[f64],
    exog: &Exog,
    ranges: &GridRanges,
    d: usize,
    sd: usize,
    s: usize,
) -> Result<GridSearchResult, SarimaxError> {
    let seasonal = s >= 2;
    let (max_sp, max_sq) = if seasonal {
        (ranges.max_sp, ranges.max_sq)
    } else {
        (0, 0)
    };
    let mut table = Vec::new();
    let mut best: Option<SarimaxFit> = None;
    let mut failures = Vec::new();
    for p in 0..=ranges.max_p {
        for q in 0..=ranges.max_q {
            for sp in 0..=max_sp {
                for sq in 0..=max_sq {
                    let order = OrderSpec::seasonal(p, d, q, sp, sd, sq, s);
                    match fit(endog, exog, &order) {
                        Ok(candidate) => {
                            table.push(GridEntry {
                                order,
                                aic: Some(candidate.aic),
                                loglik: Some(candidate.loglik),
                                converged: Some(candidate.converged),
                                error: None,
                            });
                            // Converged fits outrank non-converged ones;
                            // within a class, strictly lower AIC wins, so
                            // the lexicographically first order keeps ties.
                            let replace = match &best {
                                None => true,
                                Some(current) => {
                                    (candidate.converged && !current.converged)
                                        || (candidate.converged == current.converged
                                            && candidate.aic < current.aic)
                                }
                            };
                            if replace {
                                best = Some(candidate);
                            }
                        }
                        Err(err) => {
                            let reason = format!("{err}");
                            failures.push((order.label(), reason.clone()));
                            table.push(GridEntry {
                                order,
                                aic: None,
                                loglik: None,
                                converged: None,
                                error: Some(reason),
                            });
                        }
                    }
                }
            }
        }
    }
    match best {
        Some(best) => Ok(GridSearchResult { best, table }),
        None => Err(SarimaxError::AllCandidatesFailed { failures }),
    }
}

/// One-step-ahead predictions on the observation scale, each using only
/// data strictly before its time point.
pub fn predict_one_step(
    fit: &SarimaxFit,
    endog: &[f64],
    exog: &Exog,
) -> Result<OneStepPredictions, SarimaxError> {
    if exog.n_cols() != fit.params.beta_exog.len() {
        return Err(SarimaxError::ExogMismatch {
            expected: fit.params.beta_exog.len(),
            got: exog.n_cols(),
        });
    }
    let prepared = prepare(endog, exog, &fit.order)?;
    let (phi, theta) = expand_polynomials(&fit.params, fit.order.s);
    let ss = StateSpace::new(&phi, &theta);

    // Disturbance series u = w - intercept - X beta, filtered with the
    // fitted coefficients.
    let mut gamma = vec![fit.params.intercept];
    gamma.extend(fit.params.beta_exog.iter().copied());
    let u: Vec<f64> = (0..prepared.n_eff)
        .map(|t| {
            let mut v = prepared.w_y[t];
            for (j, g) in gamma.iter().enumerate() {
                v -= g * prepared.reg_cols[j][t];
            }
            v
        })
        .collect();
    let out = kalman_filter_multi(&ss, &[&u]).ok_or_else(|| SarimaxError::FitFailed {
        order: fit.order.label(),
        detail: "filter failed during prediction".into(),
    })?;

    let depth = fit.order.diff_depth();
    let delta = &prepared.delta;
    let n = endog.len();
    let mut predicted = vec![None; n];
    let mut residuals = vec![None; n];
    for k in 0..prepared.n_eff {
        let t = k + depth;
        // Predicted differenced value: regression part plus prior ARMA mean.
        let mut w_hat = out.prior_means[0][k];
        for (j, g) in gamma.iter().enumerate() {
            w_hat += g * prepared.reg_cols[j][k];
        }
        // Undifference against the true past observations.
        let mut y_hat = w_hat;
        for (lag, &c) in delta.iter().enumerate().skip(1) {
            y_hat -= c * endog[t - lag];
        }
        predicted[t] = Some(y_hat);
        residuals[t] = Some(endog[t] - y_hat);
    }
    Ok(OneStepPredictions {
        predicted,
        residuals,
    })
}

/// Multi-step forecast. Future exogenous rows must be supplied for every
/// step; they are never extrapolated.
pub fn forecast(
    fit: &SarimaxFit,
    horizon: usize,
    future_exog: &Exog,
) -> Result<ForecastResult, SarimaxError> {
    let n_exog = fit.params.beta_exog.len();
    if future_exog.n_cols() != n_exog {
        return Err(SarimaxError::ExogMismatch {
            expected: n_exog,
            got: future_exog.n_cols(),
        });
    }
    if n_exog > 0 && future_exog.n_rows() != horizon {
        return Err(SarimaxError::MissingFutureExog {
            needed: horizon,
            got: future_exog.n_rows(),
        });
    }
    if horizon == 0 {
        return Ok(ForecastResult {
            horizon: 0,
            mean: Vec::new(),
            variance: Vec::new(),
            interval_95: Vec::new(),
        });
    }

    let ctx = &fit.context;
    let (phi, theta) = expand_polynomials(&fit.params, fit.order.s);
    let ss = StateSpace::new(&phi, &theta);
    let r = ss.dim();
    let depth = fit.order.diff_depth();
    let delta = &ctx.delta;
    let sigma2 = fit.params.sigma2;

    // Differenced future regression part: the delta polynomial reaches
    // back into the stored exogenous tails across the forecast boundary.
    let exog_at = |col: usize, offset: i64| -> f64 {
        // offset >= 1 indexes future rows; <= 0 indexes the stored tail.
        if offset >= 1 {
            future_exog.cols()[col][(offset - 1) as usize]
        } else {
            let tail = &ctx.exog_tails[col];
            tail[(tail.len() as i64 + offset - 1) as usize]
        }
    };
    let det: Vec<f64> = (1..=horizon as i64)
        .map(|j| {
            let mut v = fit.params.intercept;
            for (c, beta) in fit.params.beta_exog.iter().enumerate() {
                let mut diffed = 0.0;
                for (lag, &coef) in delta.iter().enumerate() {
                    diffed += coef * exog_at(c, j - lag as i64);
                }
                v += beta * diffed;
            }
            v
        })
        .collect();

    // Mean recursion: the ARMA state advances by T; the observation-scale
    // mean inverts the differencing operator against recent (fore)casts.
    let mut alpha = ctx.final_state.clone();
    let mut recent: Vec<f64> = ctx.endog_tail.clone(); // y_{n-depth+1..n}
    let mut mean = Vec::with_capacity(horizon);
    let mut scratch = vec![0.0; r];
    for (j, det_j) in det.iter().enumerate() {
        if j > 0 {
            let prev = alpha.clone();
            ss.t_apply(&prev, &mut scratch);
            alpha.copy_from_slice(&scratch);
        }
        let w_mean = alpha[0] + det_j;
        let mut y_mean = w_mean;
        for (lag, &c) in delta.iter().enumerate().skip(1) {
            y_mean -= c * recent[recent.len() - lag];
        }
        recent.push(y_mean);
        mean.push(y_mean);
    }

    // Forecast-error variance. Without differencing the filter covariance
    // iterates directly; with differencing the state is augmented with the
    // y history so the variance integrates exactly through the operator:
    //
    //   X_j = [alpha_{n+j}; y_{n+j-1}, ..., y_{n+j-depth}]
    //   y_{n+j} = e1' alpha_{n+j} - sum_k delta_k y_{n+j-k} + det_j
    //
    // The readout row carries no fresh noise; innovations enter through
    // the ARMA state only.
    let variance: Vec<f64> = if depth == 0 {
        let mut p = ctx.final_cov.clone();
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            out.push(p[(0, 0)] * sigma2);
            p = ss.advance_covariance(&p);
        }
        out
    } else {
        let dim = r + depth;
        let mut a = Mat::zeros(dim, dim);
        for i in 0..r {
            a[(i, 0)] = ss.phi()[i];
            if i + 1 < r {
                a[(i, i + 1)] = 1.0;
            }
        }
        a[(r, 0)] = 1.0; // y reads the current ARMA state through Z = e1
        for lag in 1..=depth {
            a[(r, r + lag - 1)] = -delta[lag];
        }
        for m in 1..depth {
            a[(r + m, r + m - 1)] = 1.0;
        }
        let mut noise = vec![0.0; dim];
        noise[..r].copy_from_slice(ss.r_vec());

        let mut p = Mat::zeros(dim, dim);
        for i in 0..r {
            for j in 0..r {
                p[(i, j)] = ctx.final_cov[(i, j)];
            }
        }
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let ap = a.matmul(&p);
            let mut next = ap.matmul(&a.transpose());
            for i in 0..dim {
                for j in 0..dim {
                    next[(i, j)] += noise[i] * noise[j];
                }
            }
            p = next;
            out.push(p[(r, r)] * sigma2);
        }
        out
    };

    let interval_95 = mean
        .iter()
        .zip(&variance)
        .map(|(m, v)| {
            let half = Z_95 * v.sqrt();
            (m - half, m + half)
        })
        .collect();
    Ok(ForecastResult {
        horizon,
        mean,
        variance,
        interval_95,
    })
}

/// Residual diagnostics for a fitted model.
pub fn diagnostics(fit: &SarimaxFit) -> Result<DiagnosticReport, SarimaxError> {
    let resid = &fit.residuals;
    if resid.len() < 20 {
        return Err(SarimaxError::InsufficientResiduals {
            needed: 20,
            got: resid.len(),
        });
    }
    let std = stats::population_std(resid);
    if std <= 0.0 {
        return Err(SarimaxError::ZeroVarianceResiduals);
    }
    let n = resid.len();
    let mut sorted = resid.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
    let qq: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .map(|(i, &sample)| {
            let blom = (i as f64 + 1.0 - 0.375) / (n as f64 + 0.25);
            (normal_quantile(blom), sample)
        })
        .collect();
    let max_lag = 40.min(n - 1);
    let (lb_stat, lb_p) = stats::ljung_box(resid, 10);
    Ok(DiagnosticReport {
        standardized: resid.clone(),
        histogram: stats::histogram(resid, 20),
        overlay_mean: stats::mean(resid),
        overlay_std: std,
        qq,
        acf: stats::acf(resid, max_lag),
        acf_band: 1.96 / (n as f64).sqrt(),
        ljung_box_stat: lb_stat,
        ljung_box_pvalue: lb_p,
    })
}

/// Fits on the head of the series and scores one-step predictions on both
/// segments; the test segment is filtered with the training parameters,
/// never re-fitted.
pub fn evaluate(
    endog: &[f64],
    exog: &Exog,
    order: &OrderSpec,
    split_ratio: f64,
) -> Result<Evaluation, SarimaxError> {
    assert!(
        split_ratio > 0.0 && split_ratio < 1.0,
        "split ratio must lie in (0, 1)"
    );
    let n = endog.len();
    let split = (split_ratio * n as f64).floor() as usize;
    if split == 0 || split == n {
        return Err(SarimaxError::TooShort { needed: 4, got: n });
    }
    let train_exog = if exog.n_cols() > 0 {
        exog.slice_rows(0..split)
    } else {
        Exog::empty()
    };
    let fitted = fit(&endog[..split], &train_exog, order)?;
    let predictions = predict_one_step(&fitted, endog, exog)?;

    let collect_errors = |range: core::ops::Range<usize>| -> Vec<f64> {
        range.filter_map(|t| predictions.residuals[t]).collect()
    };
    let train_errors = collect_errors(0..split);
    let test_errors = collect_errors(split..n);
    if test_errors.is_empty() {
        return Err(SarimaxError::TooShort {
            needed: split + 1,
            got: n,
        });
    }
    Ok(Evaluation {
        report: EvalReport {
            split_ratio,
            rmse_train: rmse(&train_errors),
            rmse_test: rmse(&test_errors),
        },
        fit: fitted,
        predictions,
    })
}

/// Exact Gaussian log-likelihood at supplied parameter values (nothing
/// estimated); the oracle-facing entry point.
pub fn exact_loglik(
    endog: &[f64],
    exog: &Exog,
    order: &OrderSpec,
    params: &SarimaxParams,
) -> Result<f64, SarimaxError> {
    let prepared = prepare(endog, exog, order)?;
    let mut gamma = vec![params.intercept];
    gamma.extend(params.beta_exog.iter().copied());
    if gamma.len() != prepared.reg_cols.len() {
        return Err(SarimaxError::ExogMismatch {
            expected: prepared.reg_cols.len() - 1,
            got: params.beta_exog.len(),
        });
    }
    let u: Vec<f64> = (0..prepared.n_eff)
        .map(|t| {
            let mut v = prepared.w_y[t];
            for (j, g) in gamma.iter().enumerate() {
                v -= g * prepared.reg_cols[j][t];
            }
            v
        })
        .collect();
    let (phi, theta) = expand_polynomials(params, order.s);
    let ss = StateSpace::new(&phi, &theta);
    statespace::exact_loglik_arma(&ss, &u, params.sigma2).ok_or_else(|| SarimaxError::FitFailed {
        order: order.label(),
        detail: "filter failed at the supplied parameters".into(),
    })
}
