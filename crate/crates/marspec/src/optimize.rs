//! Quasi-Newton minimization of the criterion, plus the asymptotic
//! standard-error machinery.
//!
//! The optimizer is a textbook BFGS with numerical central-difference
//! gradients and a backtracking Armijo line search. The criterion returns
//! `+inf` outside the stationary region, so infeasible trial points are
//! rejected by the line search without any constraint handling.
//!
//! Standard errors come from the sandwich form
//!
//! ```text
//!   T var(theta_k) = (4 m^2 + (m^2 kap / 4 + n^2 / 2 + m n) zeta^2) * eta_kk
//!                    / ( (2 m + (n / 2) zeta^2)^2 * eta_kk^2 )
//! ```
//!
//! where `zeta`/`kap` are the standardized third/fourth innovation cumulants
//! and `eta` is the information-style integral
//! `eta_ab = int_0^1 (d_a psi / psi)(w) (d_b psi / psi)(-w) dw`
//! (frequency in cycles). In the Gaussian case (`zeta = kap = 0`) the
//! variance collapses to `1 / (eta_kk T)` for any weight choice.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Family, ModelSpec};
use crate::objective::ObjectiveContext;
use crate::theory::lag_poly_at;

/// Stopping and differencing controls for [`bfgs_minimize`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BfgsOptions {
    /// Terminate when the gradient sup-norm-free Euclidean norm drops below this.
    pub grad_tol: f64,
    /// Hard iteration cap.
    pub max_iter: usize,
    /// Relative central-difference step (`h_k = fd_step * max(1, |x_k|)`).
    pub fd_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            max_iter: 500,
            fd_step: 1e-5,
        }
    }
}

/// Terminal state of a BFGS run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], fx: f64, step: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        let h = step * x[k].abs().max(1.0);
        probe[k] = x[k] + h;
        let up = f(&probe);
        probe[k] = x[k] - h;
        let down = f(&probe);
        probe[k] = x[k];
        g[k] = match (up.is_finite(), down.is_finite()) {
            (true, true) => (up - down) / (2.0 * h),
            (true, false) => (up - fx) / h,
            (false, true) => (fx - down) / h,
            (false, false) => 0.0,
        };
    }
    g
}

/// Minimizes `f` from `x0`. `f` may return `+inf` to mark infeasible points;
/// the start itself must be feasible.
pub fn bfgs_minimize<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    opts: &BfgsOptions,
) -> Result<BfgsOutcome> {
    let dim = x0.len();
    if dim == 0 {
        return Err(Error::EmptyOrder);
    }
    let mut x = DVector::from_column_slice(x0);
    let mut fx = f(x.as_slice());
    if !fx.is_finite() {
        return Err(Error::InfeasibleStart);
    }
    // Scale the initial inverse Hessian so the first step is conservative
    // when the objective is large.
    let mut h_inv = DMatrix::<f64>::identity(dim, dim) / fx.abs().max(1.0);
    let mut g = DVector::from_vec(gradient(&f, x.as_slice(), fx, opts.fd_step));
    let mut iterations = 0usize;
    let mut converged = g.norm() < opts.grad_tol;

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let mut dir = -(&h_inv * &g);
        if dir.dot(&g) >= 0.0 {
            // Curvature information went bad; restart steepest-descent.
            h_inv = DMatrix::identity(dim, dim) / fx.abs().max(1.0);
            dir = -(&h_inv * &g);
        }
        let slope = dir.dot(&g);

        // Backtracking Armijo search; infeasible (infinite) trials just fail
        // the decrease test and halve the step.
        let mut alpha = 1.0f64;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &x + alpha * &dir;
            let ft = f(trial.as_slice());
            if ft.is_finite() && ft <= fx + 1e-4 * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            break; // no acceptable step along this direction
        };
        let g_new = DVector::from_vec(gradient(&f, x_new.as_slice(), f_new, opts.fd_step));
        let s = &x_new - &x;
        let yv = &g_new - &g;
        let sy = s.dot(&yv);
        if sy > 1e-12 * s.norm() * yv.norm() {
            // Standard BFGS inverse update.
            let rho = 1.0 / sy;
            let hy = &h_inv * &yv;
            let yhy = yv.dot(&hy);
            h_inv = &h_inv - (&hy * s.transpose() + &s * hy.transpose()) * rho
                + &s * s.transpose() * (rho * rho * yhy + rho);
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        converged = g.norm() < opts.grad_tol;
        // Optional convergence trace as JSON lines; enable with e.g.
        // RUST_LOG=marspec::optimize=debug.
        log::debug!(
            "{{\"iteration\":{iterations},\"rt\":{fx},\"grad_norm\":{}}}",
            g.norm()
        );
    }

    Ok(BfgsOutcome {
        x: x.as_slice().to_vec(),
        f: fx,
        grad_norm: g.norm(),
        iterations,
        converged,
    })
}

/// One optimized candidate: coefficients, criterion value, standard errors,
/// residual diagnostics, and optimizer telemetry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimationResult {
    pub spec: ModelSpec,
    pub rt: f64,
    /// Asymptotic standard error per coefficient (may be NaN when the
    /// residual cumulants or the information integral are unavailable).
    pub se: Vec<f64>,
    pub sse: f64,
    /// Standardized third cumulant of the fitted innovations.
    pub skewness: f64,
    /// Standardized excess fourth cumulant of the fitted innovations.
    pub excess_kurtosis: f64,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Runs BFGS on the criterion for one candidate shape `(family, r, s)` from
/// the starting vector `theta0`, then attaches residual diagnostics and
/// asymptotic standard errors.
pub fn minimize_rt(
    ctx: &ObjectiveContext,
    family: Family,
    r: usize,
    s: usize,
    theta0: &[f64],
    opts: &BfgsOptions,
) -> Result<EstimationResult> {
    if r + s != ctx.p() {
        return Err(Error::InvalidParameter(format!(
            "candidate order {} does not match context order {}",
            r + s,
            ctx.p()
        )));
    }
    ModelSpec::trial(family, r, s, theta0)?; // validate the shape once
    let objective = |theta: &[f64]| {
        let spec = ModelSpec::trial(family, r, s, theta).expect("shape validated above");
        ctx.rt_value(&spec)
    };
    let outcome = bfgs_minimize(objective, theta0, &BfgsOptions { ..*opts })?;
    let spec = ModelSpec::trial(family, r, s, &outcome.x).expect("shape validated above");

    let (sse, skewness, excess_kurtosis, se) = match crate::model::residuals(&spec, ctx.y()) {
        Ok((eps, sse)) => {
            let (zeta, kappa) = crate::spectral::sample_cumulants(&eps).unwrap_or((0.0, 0.0));
            let se = eta_integral(&spec)
                .and_then(|eta| {
                    asymptotic_se_from_eta(&eta, zeta, kappa, ctx.m(), ctx.n(), ctx.t())
                })
                .unwrap_or_else(|e| {
                    log::warn!("standard errors unavailable for {spec}: {e}");
                    vec![f64::NAN; r + s]
                });
            (sse, zeta, kappa, se)
        }
        Err(e) => {
            log::warn!("residual pass failed for {spec}: {e}");
            (f64::NAN, f64::NAN, f64::NAN, vec![f64::NAN; r + s])
        }
    };

    Ok(EstimationResult {
        spec,
        rt: outcome.f,
        se,
        sse,
        skewness,
        excess_kurtosis,
        converged: outcome.converged,
        iterations: outcome.iterations,
        grad_norm: outcome.grad_norm,
    })
}

/// Relative log-derivative of the transfer with respect to each coefficient,
/// evaluated at cycle frequency `w` (so `z = exp(-2 pi i w)`).
fn score_vector(spec: &ModelSpec, w: f64) -> Vec<Complex64> {
    let z = Complex64::from_polar(1.0, -std::f64::consts::TAU * w);
    let mut g = Vec::with_capacity(spec.order());
    if !spec.phi().is_empty() {
        let denom = lag_poly_at(spec.phi(), z);
        let mut zk = Complex64::new(1.0, 0.0);
        for _ in 0..spec.phi().len() {
            zk *= z;
            g.push(zk / denom);
        }
    }
    if !spec.varphi().is_empty() {
        let zc = z.conj();
        let denom = lag_poly_at(spec.varphi(), zc);
        let mut zk = Complex64::new(1.0, 0.0);
        for _ in 0..spec.varphi().len() {
            zk *= zc;
            g.push(zk / denom);
        }
    }
    g
}

/// Information-style integral `eta` as a dense `(r+s) x (r+s)` matrix.
///
/// The integrand is smooth and 1-periodic, so the trapezoid rule converges
/// spectrally fast; the grid is doubled until two successive refinements
/// agree to `1e-8` (absolute, entrywise).
pub fn eta_integral(spec: &ModelSpec) -> Result<Vec<Vec<f64>>> {
    if !spec.is_stationary() {
        return Err(Error::NonStationary {
            min_modulus: f64::NAN,
        });
    }
    let dim = spec.order();
    if dim == 0 {
        return Err(Error::EmptyOrder);
    }
    let eval_mean = |n: usize| -> Vec<Vec<f64>> {
        let mut acc = vec![vec![0.0; dim]; dim];
        for k in 0..n {
            let w = k as f64 / n as f64;
            let g = score_vector(spec, w);
            for a in 0..dim {
                for b in 0..dim {
                    // (d_a psi/psi)(w) * (d_b psi/psi)(-w); the value at -w is
                    // the conjugate, and the full-period integral is real.
                    acc[a][b] += (g[a] * g[b].conj()).re;
                }
            }
        }
        acc.iter()
            .map(|row| row.iter().map(|v| v / n as f64).collect())
            .collect()
    };
    let mut n = 64usize;
    let mut prev = eval_mean(n);
    loop {
        n *= 2;
        let next = eval_mean(n);
        let gap = prev
            .iter()
            .flatten()
            .zip(next.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if gap < 1e-8 {
            return Ok(next);
        }
        if n > (1 << 22) {
            return Err(Error::Quadrature(format!(
                "entrywise gap {gap:.3e} after {n} nodes"
            )));
        }
        prev = next;
    }
}

/// Asymptotic standard errors per coefficient given residual cumulants and
/// sample size, using the diagonal of the `eta` matrix.
///
/// For symmetric innovations with no excess fourth cumulant and
/// spectrum-only weights, the sandwich collapses to the classical
/// `sqrt((1 - phi^2) / T)` of a lag-one autoregression:
///
/// ```
/// use marspec::model::ModelSpec;
/// use marspec::optimize::asymptotic_se;
///
/// let spec = ModelSpec::causal(vec![0.7])?;
/// let se = asymptotic_se(&spec, 0.0, 0.0, 1.0, 0.0, 400)?;
/// assert!((se[0] - (0.51f64 / 400.0).sqrt()).abs() < 1e-12);
/// # Ok::<(), marspec::Error>(())
/// ```
pub fn asymptotic_se(
    spec: &ModelSpec,
    zeta: f64,
    kappa: f64,
    m: f64,
    n: f64,
    t: usize,
) -> Result<Vec<f64>> {
    let eta = eta_integral(spec)?;
    asymptotic_se_from_eta(&eta, zeta, kappa, m, n, t)
}

fn asymptotic_se_from_eta(
    eta: &[Vec<f64>],
    zeta: f64,
    kappa: f64,
    m: f64,
    n: f64,
    t: usize,
) -> Result<Vec<f64>> {
    if m < 0.0 || n < 0.0 {
        return Err(Error::InvalidParameter(
            "weights must be non-negative".into(),
        ));
    }
    let z2 = zeta * zeta;
    let numer = 4.0 * m * m + (m * m * kappa / 4.0 + n * n / 2.0 + m * n) * z2;
    let denom = (2.0 * m + n / 2.0 * z2).powi(2);
    if denom < 1e-12 {
        return Err(Error::InvalidParameter(
            "variance denominator vanishes (m = 0 with symmetric innovations)".into(),
        ));
    }
    let tf = t as f64;
    eta.iter()
        .enumerate()
        .map(|(k, row)| {
            let eta_kk = row[k];
            if eta_kk <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "eta diagonal entry {k} is not positive"
                )));
            }
            Ok((numer / (denom * eta_kk * tf)).sqrt())
        })
        .collect()
}
