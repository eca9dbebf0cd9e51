//! Sample frequency-domain summaries: discrete Fourier transform,
//! periodogram, and biperiodogram.
//!
//! All quantities live on the Fourier grid `w_j = 2 pi j / T`:
//!
//! ```text
//!   d(w_j)        = sum_{t=0}^{T-1} y_t exp(-i t w_j)
//!   I2(w_j)       = |d(w_j)|^2 / (2 pi T)
//!   I3(w_j, w_i)  = d(w_j) d(w_i) conj(d(w_{(j+i) mod T})) / ((2 pi)^2 T)
//! ```
//!
//! The third-order factor wraps modulo `2 pi`, so the full `(T-1) x (T-1)`
//! grid of bifrequencies is well defined. The periodogram of a real series
//! is symmetric in `w -> 2 pi - w`; the biperiodogram is generally **not**
//! conjugate-symmetric under swapping a series with its time reversal, which
//! is exactly the information the estimation objective exploits.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

const TWO_PI: f64 = std::f64::consts::TAU;

fn validate_series(y: &[f64], min_len: usize) -> Result<()> {
    if y.len() < min_len {
        return Err(Error::SeriesTooShort {
            needed: min_len,
            got: y.len(),
        });
    }
    if let Some(idx) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData { index: idx });
    }
    Ok(())
}

fn warn_if_uncentered(y: &[f64]) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd > 0.0 && mean.abs() > 1e-8 * sd {
        log::warn!(
            "series mean {:.3e} is large relative to its spread; \
             frequency-domain summaries assume a centered series",
            mean
        );
    }
}

/// Subtracts the sample mean.
pub fn center(y: &[f64]) -> Vec<f64> {
    let mean = y.iter().sum::<f64>() / y.len().max(1) as f64;
    y.iter().map(|v| v - mean).collect()
}

/// Discrete Fourier transform `d(w_j)` for `j = 0..T-1`, computed by FFT.
pub fn dft(y: &[f64]) -> Result<Vec<Complex64>> {
    validate_series(y, 2)?;
    let mut buf: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    Ok(buf)
}

/// Periodogram on the interior grid `j = 1..T-1` (length `T-1`).
///
/// Emits a log warning when the input does not look centered; see [`center`].
pub fn periodogram(y: &[f64]) -> Result<Vec<f64>> {
    warn_if_uncentered(y);
    let d = dft(y)?;
    Ok(periodogram_from_dft(&d))
}

pub(crate) fn periodogram_from_dft(d: &[Complex64]) -> Vec<f64> {
    let t = d.len();
    let scale = 1.0 / (TWO_PI * t as f64);
    (1..t).map(|j| d[j].norm_sqr() * scale).collect()
}

/// Biperiodogram on the full interior grid, row-major over
/// `(j, i) in {1..T-1}^2`; entry `(j, i)` sits at `(j-1)*(T-1) + (i-1)`.
pub fn biperiodogram(y: &[f64]) -> Result<Vec<Complex64>> {
    warn_if_uncentered(y);
    let d = dft(y)?;
    Ok(biperiodogram_from_dft(&d))
}

pub(crate) fn biperiodogram_from_dft(d: &[Complex64]) -> Vec<Complex64> {
    let t = d.len();
    let n = t - 1;
    let scale = 1.0 / (TWO_PI * TWO_PI * t as f64);
    let mut grid = vec![Complex64::default(); n * n];
    // Rows are independent; each cell is a pure function of the DFT, so the
    // fill is deterministic for any worker count.
    grid.par_chunks_mut(n).enumerate().for_each(|(row, chunk)| {
        let j = row + 1;
        for (col, cell) in chunk.iter_mut().enumerate() {
            let i = col + 1;
            let k = j + i;
            let k = if k >= t { k - t } else { k };
            // Scale last: both multiplication orders round identically, so
            // the grid stays exactly symmetric in its arguments.
            *cell = d[j] * d[i] * d[k].conj() * scale;
        }
    });
    grid
}

/// Periodogram and biperiodogram of one series, with the grid metadata
/// needed by the estimation objective.
#[derive(Debug, Clone)]
pub struct SpectralSummaries {
    t: usize,
    freqs: Vec<f64>,
    i2: Vec<f64>,
    i3: Vec<Complex64>,
}

impl SpectralSummaries {
    /// Computes both summaries. `second_order_only` skips the
    /// `O(T^2)` biperiodogram grid for spectrum-only estimation.
    pub fn compute(y: &[f64], second_order_only: bool) -> Result<Self> {
        validate_series(y, 3)?;
        warn_if_uncentered(y);
        let d = dft(y)?;
        let t = y.len();
        let freqs = (1..t).map(|j| TWO_PI * j as f64 / t as f64).collect();
        let i2 = periodogram_from_dft(&d);
        let i3 = if second_order_only {
            Vec::new()
        } else {
            biperiodogram_from_dft(&d)
        };
        Ok(Self { t, freqs, i2, i3 })
    }

    /// Series length `T`.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Grid frequencies `w_j = 2 pi j / T`, `j = 1..T-1`.
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    /// Periodogram over the interior grid.
    pub fn i2(&self) -> &[f64] {
        &self.i2
    }

    /// Biperiodogram grid (row-major, empty when skipped).
    pub fn i3(&self) -> &[Complex64] {
        &self.i3
    }

    /// Biperiodogram value at bifrequency `(w_j, w_i)`, `1 <= j, i <= T-1`.
    pub fn i3_at(&self, j: usize, i: usize) -> Complex64 {
        let n = self.t - 1;
        self.i3[(j - 1) * n + (i - 1)]
    }
}

/// Standardized third and fourth cumulants `(m3 / m2^{3/2}, m4 / m2^2 - 3)`
/// of a residual sample (skewness and *excess* kurtosis).
pub fn sample_cumulants(e: &[f64]) -> Result<(f64, f64)> {
    validate_series(e, 2)?;
    let n = e.len() as f64;
    let mean = e.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in e {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 < 1e-300 {
        return Err(Error::ZeroVariance);
    }
    Ok((m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0))
}
