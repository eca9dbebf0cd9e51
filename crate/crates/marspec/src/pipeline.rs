//! Empirical-data workflow: CSV ingestion, detrending transforms, order
//! selection, and residual diagnostics.
//!
//! The intended flow mirrors how the estimators are used on real data: load
//! a dated series from CSV, transform it to something plausibly stationary
//! (Hodrick–Prescott cycle or log returns), pick the total order `p` with
//! second-order information criteria, estimate and identify, then check the
//! preliminary residuals with a portmanteau test and summarize the series
//! with moment statistics.

use std::path::Path;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Transformation already applied to a [`SeriesFrame`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    None,
    HpCycle,
    LogReturns,
}

/// A named, dated series moving through the pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesFrame {
    pub name: String,
    /// Strictly increasing dates, ISO-8601 (`YYYY-MM-DD`) or month (`YYYY-MM`).
    pub timestamps: Vec<String>,
    pub values: Vec<f64>,
    pub transform_applied: Transform,
}

/// Parses an ISO-8601 date or a `YYYY-MM` month (read as its first day).
/// Anything else is rejected rather than guessed.
fn parse_date(s: &str) -> Result<NaiveDate> {
    let padded;
    let candidate = if s.len() == 7 && s.as_bytes()[4] == b'-' {
        padded = format!("{s}-01");
        &padded
    } else {
        s
    };
    NaiveDate::parse_from_str(candidate, "%Y-%m-%d").map_err(|_| {
        Error::InvalidParameter(format!(
            "unparsable date {s:?} (expected YYYY-MM-DD or YYYY-MM)"
        ))
    })
}

impl SeriesFrame {
    /// Validates lengths, finiteness, and strictly increasing dates.
    pub fn new(
        name: impl Into<String>,
        timestamps: Vec<String>,
        values: Vec<f64>,
        transform_applied: Transform,
    ) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} timestamps vs {} values",
                timestamps.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData { index });
        }
        let dates: Vec<NaiveDate> = timestamps
            .iter()
            .map(|s| parse_date(s))
            .collect::<Result<_>>()?;
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "timestamps not strictly increasing at {:?} -> {:?}",
                timestamps[i],
                timestamps[i + 1]
            )));
        }
        Ok(Self {
            name: name.into(),
            timestamps,
            values,
            transform_applied,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Estimation entry points require a minimally informative sample.
    pub fn require_estimation_length(&self) -> Result<()> {
        if self.len() < 50 {
            return Err(Error::SeriesTooShort {
                needed: 50,
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// Loads one value column from a headered CSV whose first column holds the
/// dates. Lines starting with `#` are skipped (provenance comments). Missing
/// entries (`NA`, `NaN`, `.`, or empty cells) reject the whole file, naming
/// the offending line.
pub fn load_csv(path: impl AsRef<Path>, column: &str) -> Result<SeriesFrame> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let col = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::MissingColumn {
            name: column.to_string(),
            available: headers.iter().map(str::to_string).collect(),
        })?;
    if col == 0 {
        return Err(Error::InvalidParameter(format!(
            "column {column:?} is the date column; pick a value column"
        )));
    }
    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line()) as usize;
        let date = record
            .get(0)
            .ok_or_else(|| Error::BadRow {
                row: line,
                reason: "missing date cell".into(),
            })?
            .trim();
        let cell = record
            .get(col)
            .ok_or_else(|| Error::BadRow {
                row: line,
                reason: format!("missing cell for column {column:?}"),
            })?
            .trim();
        if cell.is_empty() || matches!(cell, "NA" | "NaN" | "nan" | ".") {
            return Err(Error::BadRow {
                row: line,
                reason: format!("missing value ({cell:?}) for column {column:?}"),
            });
        }
        let value: f64 = cell.parse().map_err(|_| Error::BadRow {
            row: line,
            reason: format!("unparsable numeric {cell:?}"),
        })?;
        parse_date(date).map_err(|e| Error::BadRow {
            row: line,
            reason: e.to_string(),
        })?;
        timestamps.push(date.to_string());
        values.push(value);
    }
    if values.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: values.len(),
        });
    }
    SeriesFrame::new(column, timestamps, values, Transform::None)
}

/// Log returns `r_t = log(y_t) - log(y_{t-1})`, length `T - 1`. The result is
/// left uncentered; estimation entry points center internally.
pub fn log_returns(frame: &SeriesFrame) -> Result<SeriesFrame> {
    if frame.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: frame.len(),
        });
    }
    if let Some(i) = frame.values.iter().position(|&v| v <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "log returns need positive levels; value {} at index {i}",
            frame.values[i]
        )));
    }
    let values: Vec<f64> = frame
        .values
        .windows(2)
        .map(|w| w[1].ln() - w[0].ln())
        .collect();
    SeriesFrame::new(
        frame.name.clone(),
        frame.timestamps[1..].to_vec(),
        values,
        Transform::LogReturns,
    )
}

/// Hodrick–Prescott decomposition: the trend minimizes
/// `Σ (y_t - τ_t)² + λ Σ (Δ²τ_t)²`, solved through the symmetric
/// pentadiagonal system `(I + λ D'D) τ = y` by a banded Cholesky
/// factorization; the cycle is `y - τ`. The default monthly penalty is
/// `λ = 129600`.
pub fn hp_filter(frame: &SeriesFrame, lambda: f64) -> Result<(SeriesFrame, SeriesFrame)> {
    if frame.len() < 4 {
        return Err(Error::SeriesTooShort {
            needed: 4,
            got: frame.len(),
        });
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "HP penalty must be finite and nonnegative, got {lambda}"
        )));
    }
    let trend = hp_trend(&frame.values, lambda)?;
    let cycle: Vec<f64> = frame
        .values
        .iter()
        .zip(&trend)
        .map(|(y, tau)| y - tau)
        .collect();
    let trend_frame = SeriesFrame::new(
        format!("{}_trend", frame.name),
        frame.timestamps.clone(),
        trend,
        Transform::None,
    )?;
    let cycle_frame = SeriesFrame::new(
        format!("{}_cycle", frame.name),
        frame.timestamps.clone(),
        cycle,
        Transform::HpCycle,
    )?;
    Ok((trend_frame, cycle_frame))
}

/// Assembles the three bands of `I + λ D'D` (`D` = second differences) and
/// solves for the trend.
fn hp_trend(y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let t = y.len();
    let mut diag = vec![1.0; t];
    let mut off1 = vec![0.0; t - 1];
    let mut off2 = vec![0.0; t.saturating_sub(2)];
    // Each second-difference row touches (j, j+1, j+2) with weights (1,-2,1);
    // accumulate λ·w_a·w_b into the corresponding band entries.
    for j in 0..t - 2 {
        let w = [1.0, -2.0, 1.0];
        for a in 0..3 {
            diag[j + a] += lambda * w[a] * w[a];
        }
        for a in 0..2 {
            off1[j + a] += lambda * w[a] * w[a + 1];
        }
        off2[j] += lambda * w[0] * w[2];
    }
    banded_cholesky_solve(&diag, &off1, &off2, y)
}

/// Solves `A x = b` for symmetric positive definite `A` with bandwidth 2,
/// given its diagonal and first/second subdiagonals.
fn banded_cholesky_solve(
    diag: &[f64],
    off1: &[f64],
    off2: &[f64],
    b: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut l0 = vec![0.0; n]; // L[i][i]
    let mut l1 = vec![0.0; n]; // L[i][i-1]
    let mut l2 = vec![0.0; n]; // L[i][i-2]
    for i in 0..n {
        if i >= 2 {
            l2[i] = off2[i - 2] / l0[i - 2];
        }
        if i >= 1 {
            let mut v = off1[i - 1];
            if i >= 2 {
                v -= l2[i] * l1[i - 1];
            }
            l1[i] = v / l0[i - 1];
        }
        let pivot = diag[i] - l1[i] * l1[i] - l2[i] * l2[i];
        if pivot <= 0.0 {
            return Err(Error::InvalidParameter(
                "penalized smoothing system is not positive definite".into(),
            ));
        }
        l0[i] = pivot.sqrt();
    }
    // Forward substitution L z = b.
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i];
        if i >= 1 {
            v -= l1[i] * z[i - 1];
        }
        if i >= 2 {
            v -= l2[i] * z[i - 2];
        }
        z[i] = v / l0[i];
    }
    // Back substitution L' x = z.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = z[i];
        if i + 1 < n {
            v -= l1[i + 1] * x[i + 1];
        }
        if i + 2 < n {
            v -= l2[i + 2] * x[i + 2];
        }
        x[i] = v / l0[i];
    }
    Ok(x)
}

/// Information-criterion scan over lag-only autoregressions `AR(k,0)`,
/// `k = 1..=pmax`, each fit by conditional least squares on the common
/// effective sample that drops the first `pmax` observations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderSelection {
    /// BIC argmin (ties resolve to the smaller order).
    pub p: usize,
    /// AIC argmin, reported alongside.
    pub p_aic: usize,
    /// `aic[k-1]` and `bic[k-1]` score order `k`.
    pub aic: Vec<f64>,
    pub bic: Vec<f64>,
    /// Least-squares coefficients per order, `coeffs[k-1]` of length `k`.
    pub coeffs: Vec<Vec<f64>>,
    /// Observations entering every fit.
    pub effective_sample: usize,
}

/// Selects the total autoregressive order by BIC (AIC reported alongside).
pub fn select_order(y: &[f64], pmax: usize) -> Result<OrderSelection> {
    if pmax == 0 {
        return Err(Error::EmptyOrder);
    }
    let t = y.len();
    if t < 2 * pmax + 10 {
        return Err(Error::SeriesTooShort {
            needed: 2 * pmax + 10,
            got: t,
        });
    }
    if let Some(index) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData { index });
    }
    let mean = y.iter().sum::<f64>() / t as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let n = t - pmax;
    let mut aic = Vec::with_capacity(pmax);
    let mut bic = Vec::with_capacity(pmax);
    let mut coeffs = Vec::with_capacity(pmax);
    for k in 1..=pmax {
        let theta = ls_fit(&yc, k, pmax)?;
        let mut ssr = 0.0;
        for ti in pmax..t {
            let pred: f64 = (1..=k).map(|j| theta[j - 1] * yc[ti - j]).sum();
            let e = yc[ti] - pred;
            ssr += e * e;
        }
        let sigma2 = (ssr / n as f64).max(f64::MIN_POSITIVE);
        aic.push(n as f64 * sigma2.ln() + 2.0 * k as f64);
        bic.push(n as f64 * sigma2.ln() + k as f64 * (n as f64).ln());
        coeffs.push(theta);
    }
    let argmin = |v: &[f64]| -> usize {
        v.iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i + 1)
            .expect("pmax >= 1")
    };
    Ok(OrderSelection {
        p: argmin(&bic),
        p_aic: argmin(&aic),
        aic,
        bic,
        coeffs,
        effective_sample: n,
    })
}

/// Conditional least squares of `y_t` on lags `1..=k`, using `t = t0..T`.
fn ls_fit(yc: &[f64], k: usize, t0: usize) -> Result<Vec<f64>> {
    let t = yc.len();
    let mut xtx = DMatrix::<f64>::zeros(k, k);
    let mut xty = DVector::<f64>::zeros(k);
    for ti in t0..t {
        for a in 0..k {
            xty[a] += yc[ti - 1 - a] * yc[ti];
            for b in a..k {
                xtx[(a, b)] += yc[ti - 1 - a] * yc[ti - 1 - b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            xtx[(a, b)] = xtx[(b, a)];
        }
    }
    let solved = xtx
        .clone()
        .cholesky()
        .map(|c| c.solve(&xty))
        .or_else(|| xtx.lu().solve(&xty));
    match solved {
        Some(v) => Ok(v.iter().copied().collect()),
        None => Err(Error::ZeroVariance),
    }
}

/// One-step prediction residuals `e_t = y_t - Σ θ_j y_{t-j}` on the centered
/// series, for `t = k..T` (length `T - k`).
pub fn ar_residuals(y: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
    let k = theta.len();
    if k == 0 {
        return Err(Error::EmptyOrder);
    }
    if y.len() <= k {
        return Err(Error::SeriesTooShort {
            needed: k + 1,
            got: y.len(),
        });
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - mean).collect();
    Ok((k..yc.len())
        .map(|t| {
            let pred: f64 = (1..=k).map(|j| theta[j - 1] * yc[t - j]).sum();
            yc[t] - pred
        })
        .collect())
}

/// One row of a portmanteau scan: `Q(h)` and its chi-square p-value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LjungBoxRow {
    pub lag: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// Ljung–Box white-noise test of `residuals` at horizons `h = 1..=lags`:
/// `Q(h) = T(T+2) Σ_{k≤h} ρ̂_k² / (T-k)` against chi-square with `h` degrees
/// of freedom.
pub fn ljung_box(residuals: &[f64], lags: usize) -> Result<Vec<LjungBoxRow>> {
    if lags == 0 {
        return Err(Error::InvalidParameter("need at least one lag".into()));
    }
    let n = residuals.len();
    if n <= lags + 5 {
        return Err(Error::SeriesTooShort {
            needed: lags + 6,
            got: n,
        });
    }
    if let Some(index) = residuals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData { index });
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let e: Vec<f64> = residuals.iter().map(|v| v - mean).collect();
    let denom: f64 = e.iter().map(|v| v * v).sum();
    if denom <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let nf = n as f64;
    let mut cum = 0.0;
    let mut rows = Vec::with_capacity(lags);
    for h in 1..=lags {
        let num: f64 = (h..n).map(|t| e[t] * e[t - h]).sum();
        let rho = num / denom;
        cum += rho * rho / (nf - h as f64);
        let q = nf * (nf + 2.0) * cum;
        let dist = ChiSquared::new(h as f64)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        rows.push(LjungBoxRow {
            lag: h,
            statistic: q,
            p_value: dist.sf(q),
        });
    }
    Ok(rows)
}

/// Sample moment summary. `sd` uses the `n-1` denominator; `skewness` and
/// `kurtosis` are the standardized third and fourth central moments with `n`
/// denominators, kurtosis reported raw (a Gaussian sample sits near 3, not 0).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Moment summary of a frame's values.
pub fn descriptive_stats(frame: &SeriesFrame) -> Result<DescriptiveStats> {
    let n = frame.len();
    if n < 4 {
        return Err(Error::SeriesTooShort { needed: 4, got: n });
    }
    let nf = n as f64;
    let mean = frame.values.iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for v in &frame.values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    let var_unbiased = m2 / (nf - 1.0);
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(DescriptiveStats {
        n,
        mean,
        sd: var_unbiased.sqrt(),
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}
