//! Alpha-stable innovation generation, data generation for all three model
//! families, and the Monte Carlo harness.
//!
//! Innovations follow the Chambers–Mallows–Stuck transform in the standard
//! S1 parametrization: the characteristic function is
//! `exp(-gamma^a |u|^a [1 - i beta sgn(u) tan(pi a / 2)] + i delta u)` for
//! `alpha != 1` (with the usual logarithmic correction at `alpha = 1`), and
//! the Gaussian limit `alpha = 2` has variance `2 gamma^2`.
//!
//! The filters are exact-length, zero-initial-condition recursions: the
//! lead-polynomial filter is literally the lag filter run on the reversed
//! innovation stream and reversed back, so the two sides share every
//! second-order property by construction. Burn-in is handled by
//! [`simulate_series`], which discards one transient window per filter pass
//! (head of a lag pass, tail of a lead pass).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::model::{Family, ModelSpec};
use crate::poly;
use crate::strategy::{estimate_candidates, EstimateOptions};

/// Alpha-stable law in the S1 parametrization: stability `alpha`, skewness
/// `beta`, scale `gamma`, location `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStableParams", into = "RawStableParams")]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawStableParams {
    alpha: f64,
    #[serde(default)]
    beta: f64,
    #[serde(default = "one")]
    gamma: f64,
    #[serde(default)]
    delta: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawStableParams> for StableParams {
    type Error = Error;
    fn try_from(raw: RawStableParams) -> Result<Self> {
        StableParams::new(raw.alpha, raw.beta, raw.gamma, raw.delta)
    }
}

impl From<StableParams> for RawStableParams {
    fn from(p: StableParams) -> Self {
        Self {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            delta: p.delta,
        }
    }
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "stability alpha must lie in (0, 2], got {alpha}"
            )));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!(
                "skewness beta must lie in [-1, 1], got {beta}"
            )));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale gamma must be positive, got {gamma}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter("location delta must be finite".into()));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// Unit-scale convenience: `gamma = 1`, `delta = 0`.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// One draw via the Chambers–Mallows–Stuck transform.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = (rng.gen::<f64>() - 0.5) * PI; // Uniform(-pi/2, pi/2)
        let w: f64 = -(1.0 - rng.gen::<f64>()).ln(); // Exp(1)
        let a = self.alpha;
        let b = self.beta;
        let x = if (a - 1.0).abs() > 1e-12 {
            let ta = (FRAC_PI_2 * a).tan();
            let b0 = (b * ta).atan() / a;
            let s0 = (1.0 + b * b * ta * ta).powf(1.0 / (2.0 * a));
            s0 * (a * (u + b0)).sin() / u.cos().powf(1.0 / a)
                * ((u - a * (u + b0)).cos() / w).powf((1.0 - a) / a)
        } else {
            let h = FRAC_PI_2 + b * u;
            (2.0 / PI) * (h * u.tan() - b * (FRAC_PI_2 * w * u.cos() / h).ln())
        };
        if (a - 1.0).abs() > 1e-12 {
            self.gamma * x + self.delta
        } else {
            // S1 scale change at alpha = 1 shifts the location.
            self.gamma * x + self.delta + 2.0 / PI * b * self.gamma * self.gamma.ln()
        }
    }
}

/// `n` i.i.d. alpha-stable draws, deterministic in `seed`.
pub fn stable_sample(params: &StableParams, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| params.draw(&mut rng)).collect()
}

/// Lag filter `y_t = sum_j phi_j y_{t-j} + eps_t` with zero initial
/// conditions, same length as `eps`.
fn filter_lag(phi: &[f64], eps: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; eps.len()];
    for t in 0..eps.len() {
        let mut acc = eps[t];
        for (j, &c) in phi.iter().enumerate() {
            if t > j {
                acc += c * y[t - j - 1];
            }
        }
        y[t] = acc;
    }
    y
}

/// Lead filter `y_t = sum_j vphi_j y_{t+j} + eps_t` with zero terminal
/// conditions: the lag filter on the reversed stream, reversed back.
fn filter_lead(varphi: &[f64], eps: &[f64]) -> Vec<f64> {
    let mut rev: Vec<f64> = eps.iter().rev().copied().collect();
    rev = filter_lag(varphi, &rev);
    rev.reverse();
    rev
}

fn expect_family(spec: &ModelSpec, family: Family) -> Result<()> {
    if spec.family() != family {
        return Err(Error::InvalidParameter(format!(
            "expected a {family} model, got {spec}"
        )));
    }
    if !spec.is_stationary() {
        return Err(Error::NonStationary {
            min_modulus: f64::NAN,
        });
    }
    Ok(())
}

/// Forward recursion for a lag-only model; output aligned with `eps`
/// (`y[0] = eps[0]`, impulse input yields the impulse response).
pub fn gen_causal(spec: &ModelSpec, eps: &[f64]) -> Result<Vec<f64>> {
    expect_family(spec, Family::Causal)?;
    Ok(filter_lag(spec.phi(), eps))
}

/// Backward recursion for a lead-only model; output aligned with `eps`
/// (`y[last] = eps[last]`).
pub fn gen_noncausal(spec: &ModelSpec, eps: &[f64]) -> Result<Vec<f64>> {
    expect_family(spec, Family::Noncausal)?;
    Ok(filter_lead(spec.varphi(), eps))
}

/// Two-pass filter for a two-sided model: the lead pass solves
/// `vphi(L^-1) u = eps` backward, then the lag pass solves `phi(L) y = u`
/// forward.
pub fn gen_mar(spec: &ModelSpec, eps: &[f64]) -> Result<Vec<f64>> {
    expect_family(spec, Family::Mixed)?;
    let u = filter_lead(spec.varphi(), eps);
    Ok(filter_lag(spec.phi(), &u))
}

/// Transient window for one filter pass with the given polynomial:
/// `max(200, 10 / ln(min root modulus))`, or zero for a degenerate
/// (identity) pass.
pub fn burn_in_length(coeffs: &[f64]) -> Result<usize> {
    if coeffs.iter().all(|&c| c == 0.0) {
        return Ok(0); // identity pass: no transient
    }
    match poly::min_root_modulus(coeffs)? {
        None => Ok(0),
        Some(m) if m <= 1.0 => Err(Error::NonStationary { min_modulus: m }),
        Some(m) => Ok(200usize.max((10.0 / m.ln()).ceil() as usize)),
    }
}

/// Draws innovations and filters them into a stationary sample path of
/// exactly `t` observations, discarding one burn-in window per filter pass.
///
/// The path is a pure function of `(spec, noise, t, seed)`:
///
/// ```
/// use marspec::model::ModelSpec;
/// use marspec::simulate::{simulate_series, StableParams};
///
/// let spec = ModelSpec::causal(vec![0.7])?;
/// let noise = StableParams::new(1.5, 0.0, 1.0, 0.0)?;
/// let a = simulate_series(&spec, &noise, 100, 9)?;
/// let b = simulate_series(&spec, &noise, 100, 9)?;
/// assert_eq!(a, b);
/// # Ok::<(), marspec::Error>(())
/// ```
pub fn simulate_series(
    spec: &ModelSpec,
    noise: &StableParams,
    t: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_series_with_rng(spec, noise, t, &mut rng)
}

/// As [`simulate_series`], drawing from a caller-managed RNG (used by the
/// Monte Carlo harness to give each replication its own stream).
pub fn simulate_series_with_rng<R: Rng + ?Sized>(
    spec: &ModelSpec,
    noise: &StableParams,
    t: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(Error::SeriesTooShort { needed: 1, got: 0 });
    }
    if !spec.is_stationary() {
        return Err(Error::NonStationary {
            min_modulus: f64::NAN,
        });
    }
    let b_lag = burn_in_length(spec.phi())?;
    let b_lead = burn_in_length(spec.varphi())?;
    let n = t + b_lag + b_lead;
    let eps: Vec<f64> = (0..n).map(|_| noise.draw(rng)).collect();
    let y = match spec.family() {
        Family::Causal => filter_lag(spec.phi(), &eps),
        Family::Noncausal => filter_lead(spec.varphi(), &eps),
        Family::Mixed => filter_lag(spec.phi(), &filter_lead(spec.varphi(), &eps)),
    };
    // The lag pass pollutes the head, the lead pass the tail.
    Ok(y[b_lag..b_lag + t].to_vec())
}

/// One Monte Carlo campaign: a data-generating model, an innovation law, a
/// list of sample sizes, and a replication count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub dgp: ModelSpec,
    pub stable: StableParams,
    /// Sample sizes; one report cell per entry.
    pub t_list: Vec<usize>,
    /// Replications per cell.
    pub m: usize,
    pub seed: u64,
    /// Total candidate order handed to the identification step.
    pub p: usize,
    #[serde(default)]
    pub estimate: EstimateOptions,
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidParameter("replication count must be >= 1".into()));
        }
        if self.t_list.is_empty() {
            return Err(Error::InvalidParameter("sample-size list is empty".into()));
        }
        if let Some(&t) = self.t_list.iter().find(|&&t| t < 50) {
            return Err(Error::InvalidParameter(format!(
                "sample sizes below 50 are not supported, got {t}"
            )));
        }
        if self.p == 0 {
            return Err(Error::EmptyOrder);
        }
        if !self.dgp.is_stationary() {
            return Err(Error::NonStationary {
                min_modulus: f64::NAN,
            });
        }
        Ok(())
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub rep: usize,
    /// Orders `(r, s)` of the selected candidate, when estimation succeeded.
    pub selected: Option<(usize, usize)>,
    /// Whether the selected candidate matches the data-generating model.
    pub correct: bool,
    /// Estimated coefficients of the selected candidate.
    pub coefficients: Option<Vec<f64>>,
    pub rt: Option<f64>,
    pub error: Option<String>,
}

/// Aggregates for one `(T,)` cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellReport {
    pub t: usize,
    pub m: usize,
    /// Fraction of replications selecting the data-generating orders.
    pub rate: f64,
    pub correct_count: usize,
    pub failure_count: usize,
    /// Coefficient means over correctly identified replications.
    pub mean: Vec<f64>,
    /// Coefficient standard deviations over correctly identified replications.
    pub sd: Vec<f64>,
    pub records: Vec<ReplicationRecord>,
}

/// Full campaign output: one cell per sample size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub config: MonteCarloConfig,
    pub cells: Vec<CellReport>,
}

fn run_cell(config: &MonteCarloConfig, t_idx: usize, t: usize) -> CellReport {
    let dgp_orders = (config.dgp.r(), config.dgp.s());
    let records: Vec<ReplicationRecord> = (0..config.m)
        .into_par_iter()
        .map(|rep| {
            // Stream keyed by (cell, replication): results do not depend on
            // how replications are scheduled across workers.
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(((t_idx as u64) << 32) | rep as u64);
            let y = match simulate_series_with_rng(&config.dgp, &config.stable, t, &mut rng) {
                Ok(y) => y,
                Err(e) => {
                    return ReplicationRecord {
                        rep,
                        selected: None,
                        correct: false,
                        coefficients: None,
                        rt: None,
                        error: Some(format!("simulation: {e}")),
                    }
                }
            };
            match estimate_candidates(&y, config.p, &config.estimate) {
                Ok(report) => {
                    let sel = report.selected_fit();
                    let orders = (sel.r, sel.s);
                    ReplicationRecord {
                        rep,
                        selected: Some(orders),
                        correct: orders == dgp_orders,
                        coefficients: Some(sel.result.spec.params()),
                        rt: Some(sel.result.rt),
                        error: None,
                    }
                }
                Err(e) => ReplicationRecord {
                    rep,
                    selected: None,
                    correct: false,
                    coefficients: None,
                    rt: None,
                    error: Some(format!("estimation: {e}")),
                },
            }
        })
        .collect();

    let correct_count = records.iter().filter(|r| r.correct).count();
    let failure_count = records.iter().filter(|r| r.error.is_some()).count();
    let dim = config.dgp.order();
    let hits: Vec<&Vec<f64>> = records
        .iter()
        .filter(|r| r.correct)
        .filter_map(|r| r.coefficients.as_ref())
        .collect();
    let (mean, sd) = if hits.is_empty() {
        (vec![f64::NAN; dim], vec![f64::NAN; dim])
    } else {
        let k = hits.len() as f64;
        let mean: Vec<f64> = (0..dim)
            .map(|j| hits.iter().map(|c| c[j]).sum::<f64>() / k)
            .collect();
        let sd: Vec<f64> = (0..dim)
            .map(|j| {
                if hits.len() < 2 {
                    f64::NAN
                } else {
                    let v = hits
                        .iter()
                        .map(|c| (c[j] - mean[j]).powi(2))
                        .sum::<f64>()
                        / (k - 1.0);
                    v.sqrt()
                }
            })
            .collect();
        (mean, sd)
    };
    CellReport {
        t,
        m: config.m,
        rate: correct_count as f64 / config.m as f64,
        correct_count,
        failure_count,
        mean,
        sd,
        records,
    }
}

/// Runs the whole campaign. Replication failures are recorded, not fatal;
/// the output is deterministic in `config.seed` regardless of worker count.
///
/// ```
/// use marspec::model::ModelSpec;
/// use marspec::simulate::{mc_run, MonteCarloConfig, StableParams};
/// use marspec::strategy::EstimateOptions;
///
/// let config = MonteCarloConfig {
///     dgp: ModelSpec::mixed(vec![0.7], vec![0.2])?,
///     stable: StableParams::new(1.5, 0.25, 1.0, 0.0)?,
///     t_list: vec![100],
///     m: 4,
///     seed: 1,
///     p: 2,
///     estimate: EstimateOptions::default(),
/// };
/// let report = mc_run(&config)?;
/// let cell = &report.cells[0];
/// assert_eq!(cell.records.len(), 4);
/// assert!(cell.rate <= 1.0); // fraction of replications identified correctly
/// # Ok::<(), marspec::Error>(())
/// ```
pub fn mc_run(config: &MonteCarloConfig) -> Result<MonteCarloReport> {
    config.validate()?;
    let cells = config
        .t_list
        .iter()
        .enumerate()
        .map(|(t_idx, &t)| run_cell(config, t_idx, t))
        .collect();
    Ok(MonteCarloReport {
        config: config.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn parameter_ranges_are_enforced() {
        assert!(StableParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(-0.5, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.2, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 1.0, f64::NAN).is_err());
        assert!(StableParams::new(2.0, -1.0, 2.5, 3.0).is_ok());
    }

    #[test]
    fn serde_rejects_invalid_parameters() {
        let bad: std::result::Result<StableParams, _> =
            serde_json::from_str(r#"{"alpha": 2.5, "beta": 0.0}"#);
        assert!(bad.is_err());
        let ok: StableParams = serde_json::from_str(r#"{"alpha": 1.5, "beta": 0.25}"#).unwrap();
        assert_relative_eq!(ok.gamma(), 1.0);
        assert_relative_eq!(ok.delta(), 0.0);
    }

    #[test]
    fn fixed_seed_reproduces_the_sample() {
        let p = StableParams::standard(1.5, 0.25).unwrap();
        let a = stable_sample(&p, 64, 42);
        let b = stable_sample(&p, 64, 42);
        assert_eq!(a, b);
        let c = stable_sample(&p, 64, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_limit_has_variance_two_gamma_squared() {
        let p = StableParams::new(2.0, 0.7, 1.0, 0.0).unwrap(); // beta inert at alpha = 2
        let x = stable_sample(&p, 100_000, 7);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!((var - 2.0).abs() < 0.05, "sample variance {var}");
        assert!(mean.abs() < 0.02, "sample mean {mean}");
    }

    #[test]
    fn cauchy_branch_has_unit_quartiles() {
        // alpha = 1, beta = 0 is standard Cauchy: quartiles at -1 and +1.
        let p = StableParams::standard(1.0, 0.0).unwrap();
        let mut x = stable_sample(&p, 100_000, 11);
        x.sort_by(f64::total_cmp);
        let q1 = x[x.len() / 4];
        let q3 = x[3 * x.len() / 4];
        assert!((q1 + 1.0).abs() < 0.03, "first quartile {q1}");
        assert!((q3 - 1.0).abs() < 0.03, "third quartile {q3}");
    }

    /// S1 characteristic function at frequency `u` (unit scale, zero shift).
    fn stable_cf(alpha: f64, beta: f64, u: f64) -> Complex64 {
        let au = u.abs().powf(alpha);
        let skew = beta * u.signum() * (FRAC_PI_2 * alpha).tan();
        (Complex64::new(-au, au * skew)).exp()
    }

    /// CDF from the characteristic function via the inversion formula
    /// `F(x) = 1/2 - (1/pi) int_0^inf Im(e^{-iux} cf(u)) / u du`.
    fn cdf_from_cf(alpha: f64, beta: f64, x: f64) -> f64 {
        // |cf| = exp(-u^alpha): truncating at u = 14 leaves < 1e-16 mass.
        let hi = 14.0f64;
        let n = 14_000usize; // Simpson panels
        let h = hi / n as f64;
        let integrand = |u: f64| -> f64 {
            if u <= 1e-12 {
                return -x; // limit as u -> 0 for alpha > 1
            }
            ((-Complex64::i() * u * x).exp() * stable_cf(alpha, beta, u)).im / u
        };
        let mut acc = integrand(0.0) + integrand(hi);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * integrand(k as f64 * h);
        }
        0.5 - acc * h / (3.0 * PI)
    }

    #[test]
    fn skewed_stable_sample_matches_cf_inversion() {
        let (alpha, beta) = (1.5, 0.25);
        let p = StableParams::standard(alpha, beta).unwrap();
        let mut x = stable_sample(&p, 100_000, 2024);
        x.sort_by(f64::total_cmp);
        let mut worst = 0.0f64;
        for k in -60..=60 {
            let q = k as f64 * 0.25; // grid over [-15, 15]
            let emp = x.partition_point(|&v| v <= q) as f64 / x.len() as f64;
            let theo = cdf_from_cf(alpha, beta, q);
            worst = worst.max((emp - theo).abs());
        }
        assert!(worst < 0.01, "sup CDF gap {worst}");
    }

    #[test]
    fn impulse_response_of_lag_filter() {
        let spec = ModelSpec::causal(vec![0.7]).unwrap();
        let mut eps = vec![0.0; 6];
        eps[0] = 1.0;
        let y = gen_causal(&spec, &eps).unwrap();
        for (t, v) in y.iter().enumerate() {
            assert_relative_eq!(*v, 0.7f64.powi(t as i32), epsilon = 1e-15);
        }
    }

    #[test]
    fn white_noise_model_passes_innovations_through() {
        let spec = ModelSpec::white_noise();
        let eps = vec![1.0, -2.0, 0.5];
        assert_eq!(gen_causal(&spec, &eps).unwrap(), eps);
    }

    #[test]
    fn lead_filter_equals_reversed_lag_filter_exactly() {
        let eps = stable_sample(&StableParams::standard(1.7, 0.5).unwrap(), 300, 9);
        let nc = ModelSpec::noncausal(vec![0.6, 0.2]).unwrap();
        let ca = ModelSpec::causal(vec![0.6, 0.2]).unwrap();
        let direct = gen_noncausal(&nc, &eps).unwrap();
        let mut rev_eps = eps.clone();
        rev_eps.reverse();
        let mut twin = gen_causal(&ca, &rev_eps).unwrap();
        twin.reverse();
        assert_eq!(direct, twin); // bit-identical by construction
    }

    #[test]
    fn lead_filter_satisfies_its_recursion() {
        let eps = stable_sample(&StableParams::standard(1.9, 0.0).unwrap(), 100, 13);
        let spec = ModelSpec::noncausal(vec![0.5, 0.3]).unwrap();
        let y = gen_noncausal(&spec, &eps).unwrap();
        for t in 0..y.len() {
            let mut rhs = eps[t];
            if t + 1 < y.len() {
                rhs += 0.5 * y[t + 1];
            }
            if t + 2 < y.len() {
                rhs += 0.3 * y[t + 2];
            }
            assert_relative_eq!(y[t], rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn family_mismatch_is_rejected() {
        let spec = ModelSpec::causal(vec![0.5]).unwrap();
        assert!(gen_noncausal(&spec, &[1.0]).is_err());
        assert!(gen_mar(&spec, &[1.0]).is_err());
    }

    #[test]
    fn lag_one_autocorrelation_matches_theory() {
        let spec = ModelSpec::causal(vec![0.7]).unwrap();
        let noise = StableParams::standard(2.0, 0.0).unwrap();
        let y = simulate_series(&spec, &noise, 1_000_000, 5).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let c0: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
        let c1: f64 = y.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        assert!((c1 / c0 - 0.7).abs() < 0.01, "lag-1 acf {}", c1 / c0);
    }

    #[test]
    fn mirror_twins_share_the_acf_but_not_third_moments() {
        // Centered-exponential innovations: skewed with all moments finite.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 1_000_000usize;
        let eps: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln() - 1.0).collect();
        let ca = gen_causal(&ModelSpec::causal(vec![0.7]).unwrap(), &eps).unwrap();
        let nc = gen_noncausal(&ModelSpec::noncausal(vec![0.7]).unwrap(), &eps).unwrap();

        let acf1 = |y: &[f64]| {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            let c0: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
            let c1: f64 = y.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
            c1 / c0
        };
        assert!((acf1(&ca) - acf1(&nc)).abs() < 0.01);

        // E[y_t^2 y_{t+1}] = mu3 * phi / (1 - phi^3) on the lag side but
        // mu3 * phi^2 / (1 - phi^3) on the lead side (mu3 = 2 here).
        let cross = |y: &[f64]| {
            y.windows(2).map(|w| w[0] * w[0] * w[1]).sum::<f64>() / (y.len() - 1) as f64
        };
        let lag_theory = 2.0 * 0.7 / (1.0 - 0.343);
        let lead_theory = 2.0 * 0.49 / (1.0 - 0.343);
        assert!((cross(&ca) - lag_theory).abs() < 0.2, "{}", cross(&ca));
        assert!((cross(&nc) - lead_theory).abs() < 0.2, "{}", cross(&nc));
    }

    #[test]
    fn degenerate_mixed_model_reduces_to_one_sided_output() {
        let eps = stable_sample(&StableParams::standard(1.8, 0.3).unwrap(), 200, 17);
        let mixed = ModelSpec::mixed(vec![0.7], vec![0.0]).unwrap();
        let causal = ModelSpec::causal(vec![0.7]).unwrap();
        assert_eq!(gen_mar(&mixed, &eps).unwrap(), gen_causal(&causal, &eps).unwrap());

        let mixed2 = ModelSpec::mixed(vec![0.0], vec![0.2]).unwrap();
        let noncausal = ModelSpec::noncausal(vec![0.2]).unwrap();
        assert_eq!(
            gen_mar(&mixed2, &eps).unwrap(),
            gen_noncausal(&noncausal, &eps).unwrap()
        );
    }

    #[test]
    fn burn_in_grows_near_the_unit_circle() {
        assert_eq!(burn_in_length(&[]).unwrap(), 0);
        assert_eq!(burn_in_length(&[0.7]).unwrap(), 200); // 10/ln(1/0.7) ~ 28
        let near = burn_in_length(&[1.0 / 1.01]).unwrap(); // root at 1.01
        assert_eq!(near, (10.0 / 1.01f64.ln()).ceil() as usize);
        assert!(near > 1000);
        assert!(burn_in_length(&[1.0]).is_err());
    }

    #[test]
    fn simulated_series_has_exact_length_and_is_seed_deterministic() {
        let spec = ModelSpec::mixed(vec![0.7], vec![0.2]).unwrap();
        let noise = StableParams::standard(1.5, 0.25).unwrap();
        let a = simulate_series(&spec, &noise, 321, 99).unwrap();
        let b = simulate_series(&spec, &noise, 321, 99).unwrap();
        assert_eq!(a.len(), 321);
        assert_eq!(a, b);
        let c = simulate_series(&spec, &noise, 321, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn near_unit_root_paths_stay_finite() {
        let spec = ModelSpec::causal(vec![1.0 / 1.05]).unwrap();
        let noise = StableParams::standard(1.5, -0.5).unwrap();
        let y = simulate_series(&spec, &noise, 100_000, 4).unwrap();
        assert!(y.iter().all(|v| v.is_finite()));
    }

    fn tiny_config() -> MonteCarloConfig {
        MonteCarloConfig {
            dgp: ModelSpec::causal(vec![0.7]).unwrap(),
            stable: StableParams::standard(1.6, 0.3).unwrap(),
            t_list: vec![150],
            m: 12,
            seed: 314,
            p: 1,
            estimate: EstimateOptions::default(),
        }
    }

    #[test]
    fn monte_carlo_report_shape_and_determinism() {
        let config = tiny_config();
        let a = mc_run(&config).unwrap();
        assert_eq!(a.cells.len(), 1);
        let cell = &a.cells[0];
        assert_eq!(cell.records.len(), 12);
        assert_eq!(cell.m, 12);
        assert!(cell.rate >= 0.5, "identification rate {}", cell.rate);
        assert_eq!(cell.correct_count, (cell.rate * 12.0).round() as usize);
        assert!(cell.mean[0].is_finite());

        let b = mc_run(&config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn single_replication_report_has_one_record() {
        let config = MonteCarloConfig {
            m: 1,
            ..tiny_config()
        };
        let report = mc_run(&config).unwrap();
        assert_eq!(report.cells[0].records.len(), 1);
        assert!(report.cells[0].sd[0].is_nan() || report.cells[0].correct_count == 0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut config = tiny_config();
        config.m = 0;
        assert!(mc_run(&config).is_err());
        let mut config = tiny_config();
        config.t_list = vec![30];
        assert!(mc_run(&config).is_err());
        let mut config = tiny_config();
        config.t_list.clear();
        assert!(mc_run(&config).is_err());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let config = tiny_config();
        let text = toml::to_string(&config).unwrap();
        let back: MonteCarloConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.dgp.params(), config.dgp.params());
        assert_eq!(back.m, config.m);
        assert_eq!(back.seed, config.seed);
        assert_relative_eq!(back.stable.alpha(), 1.6);
    }
}
