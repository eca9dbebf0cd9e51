//! The spectrum/bispectrum minimum-distance objective.
//!
//! For a candidate coefficient vector `theta`, the criterion compares the
//! observed periodogram `I2` and biperiodogram `I3` with the model-implied
//! `S2*`/`S3*` (whose innovation cumulants `k2*(theta)`, `k3*(theta)` are
//! re-fitted to the sample at every evaluation):
//!
//! ```text
//!   R_T(theta) = A2T * sum_j   [ (I2_j - S2*_j) / D2_j ]^2
//!              + A3T * sum_j,i | I3_ji - S3*_ji |^2 * W3_ji
//! ```
//!
//! The denominators `D2`/`W3` and the scalings
//! `A2T = m (2 pi)^2 / (4 kbar2^2 T)`, `A3T = n (2 pi)^4 / (6 kbar2^3 T^2)`
//! are frozen at a preliminary causal fit `theta_bar` (Gaussian likelihood,
//! i.e. least squares) with implied innovation variance `kbar2`, so the
//! criterion itself stays a fixed function of `theta` during optimization.
//! Weights satisfy `m + n = 1`; `m = 1` reduces to a spectrum-only
//! (Whittle-style) criterion that cannot distinguish a model from its
//! time-reversal mirror, while `n > 0` brings in the bispectrum, which can.
//!
//! The third-order weight divides by `|psi psi psi|^2` evaluated at
//! `theta_bar` (a real, positive quantity). Dividing instead by the real
//! part of the complex triple product is available behind
//! [`ThirdOrderWeight::RealPart`] for sensitivity runs; it can produce
//! negative weights and is not the default.
//!
//! All reductions run in a fixed row-major order with compensated summation,
//! so a given input yields bit-identical criterion values on every run and
//! thread count.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::spectral::SpectralSummaries;
use crate::theory;
use crate::util::KahanSum;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Guard below which a fixed denominator cell is excluded (weight zero).
const DENOM_GUARD: f64 = 1e-12;

/// How the third-order residuals are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThirdOrderWeight {
    /// Divide by `|psi psi psi|^2` at the preliminary fit (positive weights).
    #[default]
    SquaredModulus,
    /// Divide by `Re(psi psi psi)` at the preliminary fit (signed weights;
    /// sensitivity analysis only).
    RealPart,
}

/// Objective configuration: the second-order weight `m` (third-order weight
/// is `n = 1 - m`) and the third-order weighting convention.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObjectiveOptions {
    pub m: f64,
    pub weight: ThirdOrderWeight,
}

impl Default for ObjectiveOptions {
    fn default() -> Self {
        Self {
            m: 0.5,
            weight: ThirdOrderWeight::SquaredModulus,
        }
    }
}

impl ObjectiveOptions {
    /// Spectrum/bispectrum weights `(m, 1 - m)` with `0 <= m <= 1`.
    pub fn with_m(m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "second-order weight m must lie in [0, 1], got {m}"
            )));
        }
        Ok(Self {
            m,
            weight: ThirdOrderWeight::SquaredModulus,
        })
    }
}

/// Preliminary causal fit: least-squares AR(p) coefficients and the implied
/// innovation variance on the candidate grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreliminaryFit {
    /// Least-squares AR(p) coefficients (stationary by construction; the
    /// moment-based fallback is used when plain least squares is not).
    pub theta_bar: Vec<f64>,
    /// Implied innovation variance `(2 pi / T) sum_j I2_j / |psi(theta_bar)|^2`.
    pub k2_bar: f64,
}

/// Gaussian-likelihood (least-squares) fit of a causal AR(p), with a
/// Yule-Walker fallback if the regression solution is non-stationary.
/// The input series must already be centered.
pub fn preliminary_fit(y: &[f64], p: usize) -> Result<PreliminaryFit> {
    if p == 0 {
        return Err(Error::EmptyOrder);
    }
    if y.len() < 4 * p + 4 {
        return Err(Error::SeriesTooShort {
            needed: 4 * p + 4,
            got: y.len(),
        });
    }
    let i2 = crate::spectral::periodogram(y)?;
    preliminary_fit_with_i2(y, p, &i2)
}

pub(crate) fn preliminary_fit_with_i2(y: &[f64], p: usize, i2: &[f64]) -> Result<PreliminaryFit> {
    let theta = ols_ar(y, p).filter(|c| crate::model::check_stationary(c)
        .map(|s| s.stationary)
        .unwrap_or(false));
    let theta_bar = match theta {
        Some(c) => c,
        None => {
            let c = yule_walker(y, p)?;
            let check = crate::model::check_stationary(&c)?;
            if !check.stationary {
                return Err(Error::PreliminaryFit(format!(
                    "moment-based fallback is still non-stationary \
                     (min root modulus {:.6})",
                    check.root_moduli.first().copied().unwrap_or(f64::NAN)
                )));
            }
            c
        }
    };
    let bar_spec = ModelSpec::causal(theta_bar.clone())
        .map_err(|e| Error::PreliminaryFit(e.to_string()))?;
    let k2_bar = theory::k2_star(&bar_spec, i2)?;
    Ok(PreliminaryFit { theta_bar, k2_bar })
}

/// Conditional least squares: regress `y_t` on its first `p` lags.
fn ols_ar(y: &[f64], p: usize) -> Option<Vec<f64>> {
    let t = y.len();
    let mut xtx = nalgebra::DMatrix::<f64>::zeros(p, p);
    let mut xty = nalgebra::DVector::<f64>::zeros(p);
    for t_idx in p..t {
        for a in 0..p {
            xty[a] += y[t_idx - 1 - a] * y[t_idx];
            for b in a..p {
                xtx[(a, b)] += y[t_idx - 1 - a] * y[t_idx - 1 - b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            xtx[(a, b)] = xtx[(b, a)];
        }
    }
    let sol = xtx.lu().solve(&xty)?;
    let coeffs: Vec<f64> = sol.iter().copied().collect();
    coeffs.iter().all(|c| c.is_finite()).then_some(coeffs)
}

/// Yule-Walker via Levinson-Durbin on the biased autocovariances. The biased
/// estimator keeps every reflection coefficient inside (-1, 1), so the
/// result is stationary whenever the series is non-degenerate.
fn yule_walker(y: &[f64], p: usize) -> Result<Vec<f64>> {
    let t = y.len();
    let mut acvf = vec![0.0; p + 1];
    for (k, c) in acvf.iter_mut().enumerate() {
        let mut acc = 0.0;
        for t_idx in 0..t - k {
            acc += y[t_idx] * y[t_idx + k];
        }
        *c = acc / t as f64;
    }
    if acvf[0] < 1e-300 {
        return Err(Error::ZeroVariance);
    }
    let mut a = vec![0.0; p];
    let mut e = acvf[0];
    for k in 1..=p {
        let mut acc = acvf[k];
        for j in 1..k {
            acc -= a[j - 1] * acvf[k - j];
        }
        let lambda = acc / e;
        let prev = a.clone();
        a[k - 1] = lambda;
        for j in 1..k {
            a[j - 1] = prev[j - 1] - lambda * prev[k - 1 - j];
        }
        e *= 1.0 - lambda * lambda;
        if e <= 0.0 {
            return Err(Error::PreliminaryFit(
                "prediction-error recursion collapsed".into(),
            ));
        }
    }
    Ok(a)
}

/// Everything that stays fixed while the criterion is optimized over one
/// series: the data summaries, the preliminary fit, and the weight grids.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    t: usize,
    p: usize,
    m: f64,
    n: f64,
    a2t: f64,
    a3t: f64,
    y: Vec<f64>,
    freqs: Vec<f64>,
    i2: Vec<f64>,
    i3: Vec<Complex64>,
    theta_bar: Vec<f64>,
    k2_bar: f64,
    /// 1 / |psi(theta_bar, w_j)|^2, zero where guarded out.
    inv_denom2: Vec<f64>,
    /// Third-order weight multipliers, row-major; zero where guarded out.
    w3: Vec<f64>,
    weight_mode: ThirdOrderWeight,
    skipped_second: usize,
    skipped_third: usize,
}

pub(crate) fn scale_factors(m: f64, k2_bar: f64, t: usize) -> (f64, f64) {
    let n = 1.0 - m;
    let tf = t as f64;
    let a2t = m * TWO_PI * TWO_PI / (4.0 * k2_bar * k2_bar * tf);
    let a3t = n * TWO_PI.powi(4) / (6.0 * k2_bar.powi(3) * tf * tf);
    (a2t, a3t)
}

impl ObjectiveContext {
    /// Builds the fixed context for a series and candidate order `p`.
    /// The series is centered internally.
    ///
    /// With the default mixed weights, data drawn from a lag polynomial
    /// score better at the truth than at its time-reversal mirror — the
    /// separation a spectrum-only criterion cannot deliver:
    ///
    /// ```
    /// use marspec::model::ModelSpec;
    /// use marspec::objective::{ObjectiveContext, ObjectiveOptions};
    /// use marspec::simulate::{simulate_series, StableParams};
    ///
    /// let truth = ModelSpec::causal(vec![0.7, 0.2])?;
    /// let noise = StableParams::new(1.5, 0.25, 1.0, 0.0)?;
    /// let y = simulate_series(&truth, &noise, 200, 5)?;
    ///
    /// let ctx = ObjectiveContext::build(&y, 2, ObjectiveOptions::default())?;
    /// let mirror = ModelSpec::noncausal(vec![0.7, 0.2])?;
    /// assert!(ctx.rt_value(&truth) < ctx.rt_value(&mirror));
    /// # Ok::<(), marspec::Error>(())
    /// ```
    pub fn build(y: &[f64], p: usize, opts: ObjectiveOptions) -> Result<Self> {
        if !(0.0..=1.0).contains(&opts.m) {
            return Err(Error::InvalidParameter(format!(
                "second-order weight m must lie in [0, 1], got {}",
                opts.m
            )));
        }
        if p == 0 {
            return Err(Error::EmptyOrder);
        }
        let y = crate::spectral::center(y);
        let n_weight = 1.0 - opts.m;
        let summaries = SpectralSummaries::compute(&y, n_weight == 0.0)?;
        let t = summaries.t();
        let prelim = preliminary_fit_with_i2(&y, p, summaries.i2())?;
        let bar_spec = ModelSpec::causal(prelim.theta_bar.clone())
            .map_err(|e| Error::PreliminaryFit(e.to_string()))?;
        let psi_bar = theory::transfer_grid(&bar_spec, t);

        let mut skipped_second = 0usize;
        let inv_denom2: Vec<f64> = (1..t)
            .map(|j| {
                let d = psi_bar[j].norm_sqr();
                if d.abs() < DENOM_GUARD {
                    skipped_second += 1;
                    0.0
                } else {
                    1.0 / d
                }
            })
            .collect();

        let mut skipped_third = 0usize;
        let w3 = if n_weight > 0.0 {
            let grid_n = t - 1;
            let mut w3 = vec![0.0; grid_n * grid_n];
            for j in 1..t {
                for i in 1..t {
                    let triple = psi_bar[j] * psi_bar[i] * psi_bar[(j + i) % t].conj();
                    let den = match opts.weight {
                        ThirdOrderWeight::SquaredModulus => triple.norm_sqr(),
                        ThirdOrderWeight::RealPart => triple.re,
                    };
                    let idx = (j - 1) * grid_n + (i - 1);
                    if den.abs() < DENOM_GUARD {
                        skipped_third += 1;
                    } else {
                        w3[idx] = 1.0 / den;
                    }
                }
            }
            w3
        } else {
            Vec::new()
        };

        let (a2t, a3t) = scale_factors(opts.m, prelim.k2_bar, t);
        Ok(Self {
            t,
            p,
            m: opts.m,
            n: n_weight,
            a2t,
            a3t,
            freqs: summaries.freqs().to_vec(),
            i2: summaries.i2().to_vec(),
            i3: summaries.i3().to_vec(),
            y,
            theta_bar: prelim.theta_bar,
            k2_bar: prelim.k2_bar,
            inv_denom2,
            w3,
            weight_mode: opts.weight,
            skipped_second,
            skipped_third,
        })
    }

    /// Criterion value at a trial specification. Non-stationary or otherwise
    /// infeasible trials return `+inf` so optimizers can reject them without
    /// error plumbing.
    pub fn rt_value(&self, spec: &ModelSpec) -> f64 {
        assert_eq!(
            spec.order(),
            self.p,
            "trial order {} does not match context order {}",
            spec.order(),
            self.p
        );
        if !spec.is_stationary() {
            return f64::INFINITY;
        }
        let t = self.t;
        let psi = theory::transfer_grid(spec, t);

        // Implied innovation variance and spectrum residuals.
        let k2s = theory::k2_star_from_grid(&self.i2, &psi, t);
        let mut acc2 = KahanSum::new();
        for j in 1..t {
            let s2 = k2s / TWO_PI * psi[j].norm_sqr();
            let r = (self.i2[j - 1] - s2) * self.inv_denom2[j - 1];
            acc2.add(r * r);
        }
        let mut rt = self.a2t * acc2.value();

        if self.n > 0.0 {
            let grid_n = t - 1;
            // Implied third cumulant, then bispectrum residuals. Both passes
            // walk the grid row-major with compensated accumulation; the
            // transfer triples are cached on the first pass so the second
            // only streams memory.
            let mut triples = vec![Complex64::new(0.0, 0.0); grid_n * grid_n];
            let mut acc_num = KahanSum::new();
            let mut idx = 0usize;
            for j in 1..t {
                let pj = psi[j];
                for i in 1..t {
                    let w = j + i;
                    let w = if w >= t { w - t } else { w };
                    let triple = pj * psi[i] * psi[w].conj();
                    let v = self.i3[idx];
                    let nsq = triple.norm_sqr();
                    acc_num.add((v.re * triple.re + v.im * triple.im) / nsq);
                    triples[idx] = triple;
                    idx += 1;
                }
            }
            let k3s = TWO_PI * TWO_PI / (t as f64 * t as f64) * acc_num.value();
            let b = k3s / (TWO_PI * TWO_PI);
            let mut acc3 = KahanSum::new();
            for ((&v, &triple), &w) in self.i3.iter().zip(&triples).zip(&self.w3) {
                let diff = v - b * triple;
                acc3.add(diff.norm_sqr() * w);
            }
            rt += self.a3t * acc3.value();
        }
        if rt.is_finite() {
            rt
        } else {
            f64::INFINITY
        }
    }

    /// Series length `T`.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Candidate order `p = r + s`.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Second-order weight `m`.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Third-order weight `n = 1 - m`.
    pub fn n(&self) -> f64 {
        self.n
    }

    /// The centered series the context was built from.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Grid frequencies `w_j`, `j = 1..T-1`.
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    /// Observed periodogram.
    pub fn i2(&self) -> &[f64] {
        &self.i2
    }

    /// Observed biperiodogram (empty in spectrum-only mode).
    pub fn i3(&self) -> &[Complex64] {
        &self.i3
    }

    /// Preliminary least-squares coefficients.
    pub fn theta_bar(&self) -> &[f64] {
        &self.theta_bar
    }

    /// Implied innovation variance at the preliminary fit.
    pub fn k2_bar(&self) -> f64 {
        self.k2_bar
    }

    /// Second-order scale `A2T`.
    pub fn a2t(&self) -> f64 {
        self.a2t
    }

    /// Third-order scale `A3T`.
    pub fn a3t(&self) -> f64 {
        self.a3t
    }

    /// Third-order weighting convention in effect.
    pub fn weight_mode(&self) -> ThirdOrderWeight {
        self.weight_mode
    }

    /// Grid cells excluded by the denominator guard (second, third order).
    pub fn skipped_cells(&self) -> (usize, usize) {
        (self.skipped_second, self.skipped_third)
    }
}
