//! Model-implied transfer functions, spectra, and bispectra.
//!
//! Writing `z = exp(-i w)`, the moving-average transfer of each family is
//!
//! ```text
//!   causal     psi(w) = 1 / phi(z)
//!   noncausal  psi(w) = 1 / vphi(z^-1)          (z^-1 = conj(z) on the circle)
//!   mixed      psi(w) = 1 / (phi(z) vphi(z^-1))
//! ```
//!
//! With innovation cumulants `k2e` (variance) and `k3e` (third cumulant):
//!
//! ```text
//!   S2(w)        = k2e / (2 pi)   * |psi(w)|^2
//!   S3(w1, w2)   = k3e / (2 pi)^2 * psi(w1) psi(w2) psi(-w1-w2)
//! ```
//!
//! Because the coefficients are real, `psi(-w) = conj(psi(w))`: a causal
//! model and the noncausal model with the same coefficient values share the
//! same spectrum but have complex-conjugate bispectra. The spectrum cannot
//! tell the two apart; the bispectrum can.
//!
//! The starred cumulants [`k2_star`] / [`k3_star`] are the scale estimates
//! that make a candidate's spectrum and bispectrum best match the observed
//! periodogram and biperiodogram for a *given* coefficient vector; the
//! estimation objective re-computes them at every trial point.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::util::KahanSum;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Evaluates `1 - c_1 x - ... - c_k x^k` by Horner's rule.
#[inline]
pub(crate) fn lag_poly_at(coeffs: &[f64], x: Complex64) -> Complex64 {
    let mut inner = Complex64::default();
    for &c in coeffs.iter().rev() {
        inner = inner * x + c;
    }
    Complex64::new(1.0, 0.0) - x * inner
}

/// Moving-average transfer `psi(w)` of a stationary specification.
///
/// The stationarity precondition is not re-verified here (this sits in the
/// innermost estimation loop); callers that accept untrusted coefficients
/// must check first.
pub fn transfer(spec: &ModelSpec, omega: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, -omega);
    let mut denom = Complex64::new(1.0, 0.0);
    if !spec.phi().is_empty() {
        denom *= lag_poly_at(spec.phi(), z);
    }
    if !spec.varphi().is_empty() {
        denom *= lag_poly_at(spec.varphi(), z.conj());
    }
    1.0 / denom
}

/// Transfer evaluated on the full DFT grid `w_j = 2 pi j / T`, `j = 0..T-1`.
pub(crate) fn transfer_grid(spec: &ModelSpec, t: usize) -> Vec<Complex64> {
    (0..t)
        .map(|j| transfer(spec, TWO_PI * j as f64 / t as f64))
        .collect()
}

/// Model spectrum `S2(w)` for innovation variance `k2e`.
pub fn spectrum(spec: &ModelSpec, k2e: f64, omega: f64) -> f64 {
    k2e / TWO_PI * transfer(spec, omega).norm_sqr()
}

/// Model bispectrum `S3(w1, w2)` for third innovation cumulant `k3e`.
pub fn bispectrum(spec: &ModelSpec, k3e: f64, w1: f64, w2: f64) -> Complex64 {
    let triple = transfer(spec, w1) * transfer(spec, w2) * transfer(spec, -w1 - w2);
    k3e / (TWO_PI * TWO_PI) * triple
}

fn ensure_stationary(spec: &ModelSpec) -> Result<()> {
    if spec.is_stationary() {
        Ok(())
    } else {
        Err(Error::NonStationary {
            min_modulus: f64::NAN,
        })
    }
}

/// Implied innovation variance: the scale that matches the candidate's
/// spectrum shape to an observed periodogram,
/// `k2*(theta) = (2 pi / T) sum_j I2(w_j) / |psi(theta, w_j)|^2`.
pub fn k2_star(spec: &ModelSpec, i2: &[f64]) -> Result<f64> {
    ensure_stationary(spec)?;
    if i2.is_empty() {
        return Err(Error::SeriesTooShort { needed: 2, got: 1 });
    }
    let t = i2.len() + 1;
    let psi = transfer_grid(spec, t);
    Ok(k2_star_from_grid(i2, &psi, t))
}

pub(crate) fn k2_star_from_grid(i2: &[f64], psi: &[Complex64], t: usize) -> f64 {
    let mut acc = KahanSum::new();
    for (j, &v) in i2.iter().enumerate() {
        acc.add(v / psi[j + 1].norm_sqr());
    }
    TWO_PI / t as f64 * acc.value()
}

/// Implied third innovation cumulant: the real-part match of the candidate's
/// bispectrum shape to an observed biperiodogram over the full grid,
/// `k3*(theta) = (2 pi)^2 / T^2 * sum_{j,i} Re[ I3 / (psi_j psi_i psi_{-j-i}) ]`.
pub fn k3_star(spec: &ModelSpec, i3: &[Complex64], t: usize) -> Result<f64> {
    ensure_stationary(spec)?;
    let n = t.checked_sub(1).filter(|n| n * n == i3.len()).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "biperiodogram grid length {} does not match T = {t}",
            i3.len()
        ))
    })?;
    let _ = n;
    let psi = transfer_grid(spec, t);
    Ok(k3_star_from_grid(i3, &psi, t))
}

pub(crate) fn k3_star_from_grid(i3: &[Complex64], psi: &[Complex64], t: usize) -> f64 {
    let n = t - 1;
    let mut acc = KahanSum::new();
    for j in 1..t {
        let row = &i3[(j - 1) * n..j * n];
        for (col, &v) in row.iter().enumerate() {
            let i = col + 1;
            let triple = psi[j] * psi[i] * psi[(j + i) % t].conj();
            acc.add((v / triple).re);
        }
    }
    TWO_PI * TWO_PI / (t as f64 * t as f64) * acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Family;
    use approx::assert_relative_eq;

    fn causal(phi: &[f64]) -> ModelSpec {
        ModelSpec::causal(phi.to_vec()).unwrap()
    }

    fn noncausal(varphi: &[f64]) -> ModelSpec {
        ModelSpec::noncausal(varphi.to_vec()).unwrap()
    }

    #[test]
    fn transfer_at_zero_frequency_sums_the_polynomials() {
        let c = transfer(&causal(&[0.7]), 0.0);
        assert_relative_eq!(c.re, 10.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(c.im, 0.0, epsilon = 1e-12);
        let nc = transfer(&noncausal(&[0.7]), 0.0);
        assert_relative_eq!(nc.re, 10.0 / 3.0, epsilon = 1e-12);
        let mixed = ModelSpec::mixed(vec![0.7], vec![0.2]).unwrap();
        let m = transfer(&mixed, 0.0);
        assert_relative_eq!(m.re, 1.0 / (0.3 * 0.8), epsilon = 1e-12);
    }

    #[test]
    fn transfer_is_conjugate_symmetric() {
        let spec = ModelSpec::mixed(vec![0.5, -0.2], vec![0.3]).unwrap();
        for k in 1..40 {
            let w = 0.157 * k as f64;
            let a = transfer(&spec, w);
            let b = transfer(&spec, -w);
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(a.im, -b.im, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn noncausal_transfer_conjugates_the_causal_one() {
        for k in 0..64 {
            let w = TWO_PI * k as f64 / 64.0;
            let c = transfer(&causal(&[0.7, 0.2]), w);
            let n = transfer(&noncausal(&[0.7, 0.2]), w);
            assert_relative_eq!(n.re, c.re, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(n.im, -c.im, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn spectrum_mirror_pair_is_identical() {
        let c = causal(&[0.7]);
        let n = noncausal(&[0.7]);
        let mut worst = 0.0f64;
        for j in 0..512 {
            let w = TWO_PI * j as f64 / 512.0;
            let gap = (spectrum(&c, 1.0, w) - spectrum(&n, 1.0, w)).abs();
            worst = worst.max(gap);
        }
        assert!(worst < 1e-12, "sup gap {worst}");
    }

    #[test]
    fn spectrum_integrates_to_process_variance() {
        // AR(1): var = k2e / (1 - phi^2); Riemann sum over a fine grid.
        let spec = causal(&[0.6]);
        let n = 200_000usize;
        let mut acc = 0.0;
        for j in 0..n {
            let w = TWO_PI * j as f64 / n as f64;
            acc += spectrum(&spec, 2.5, w);
        }
        let integral = acc * TWO_PI / n as f64;
        assert_relative_eq!(integral, 2.5 / (1.0 - 0.36), epsilon = 1e-6, max_relative = 1e-6);
    }

    #[test]
    fn bispectrum_is_symmetric_in_its_arguments() {
        let spec = ModelSpec::mixed(vec![0.7], vec![0.2]).unwrap();
        for (w1, w2) in [(0.3, 1.1), (2.0, 0.4), (1.5, 1.5)] {
            let a = bispectrum(&spec, 1.3, w1, w2);
            let b = bispectrum(&spec, 1.3, w2, w1);
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn bispectrum_conjugates_under_negated_arguments() {
        let spec = causal(&[0.7, 0.1]);
        let a = bispectrum(&spec, 1.0, 0.8, 1.7);
        let b = bispectrum(&spec, 1.0, -0.8, -1.7);
        assert_relative_eq!(a.re, b.re, epsilon = 1e-12, max_relative = 1e-12);
        assert_relative_eq!(a.im, -b.im, epsilon = 1e-12, max_relative = 1e-12);
    }

    #[test]
    fn mirror_bispectra_are_conjugates_and_differ() {
        let c = causal(&[0.7]);
        let n = noncausal(&[0.7]);
        let mut sup_gap = 0.0f64;
        for j in 0..512 {
            for i in [1usize, 7, 63, 200] {
                let (w1, w2) = (TWO_PI * j as f64 / 512.0, TWO_PI * i as f64 / 512.0);
                let a = bispectrum(&c, 1.0, w1, w2);
                let b = bispectrum(&n, 1.0, w1, w2);
                assert_relative_eq!(a.re, b.re, epsilon = 1e-12, max_relative = 1e-10);
                assert_relative_eq!(a.im, -b.im, epsilon = 1e-12, max_relative = 1e-10);
                sup_gap = sup_gap.max((a - b).norm());
            }
        }
        assert!(sup_gap > 1e-3, "mirror bispectra must differ, sup {sup_gap}");
    }

    #[test]
    fn white_noise_bispectrum_is_flat() {
        let wn = ModelSpec::white_noise();
        let v = bispectrum(&wn, 1.0, 0.9, 2.2);
        assert_relative_eq!(v.re, 1.0 / (TWO_PI * TWO_PI), epsilon = 1e-12);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn k2_star_recovers_planted_scale() {
        let spec = causal(&[0.7, 0.2]);
        let t = 128usize;
        let k2e = 2.3;
        let i2: Vec<f64> = (1..t)
            .map(|j| spectrum(&spec, k2e, TWO_PI * j as f64 / t as f64))
            .collect();
        let got = k2_star(&spec, &i2).unwrap();
        assert_relative_eq!(got, k2e * (t as f64 - 1.0) / t as f64, epsilon = 1e-10);
    }

    #[test]
    fn k2_star_of_white_noise_is_mean_periodogram_mass() {
        let i2 = vec![0.5, 1.5, 0.25, 0.75];
        let t = i2.len() + 1;
        let wn = ModelSpec::white_noise();
        let got = k2_star(&wn, &i2).unwrap();
        let expect = TWO_PI / t as f64 * i2.iter().sum::<f64>();
        assert_relative_eq!(got, expect, epsilon = 1e-12);
    }

    #[test]
    fn k3_star_recovers_planted_scale() {
        let spec = ModelSpec::mixed(vec![0.5], vec![0.25]).unwrap();
        let t = 48usize;
        let n = t - 1;
        let k3e = -1.7;
        let mut i3 = vec![Complex64::default(); n * n];
        for j in 1..t {
            for i in 1..t {
                let (w1, w2) = (TWO_PI * j as f64 / t as f64, TWO_PI * i as f64 / t as f64);
                i3[(j - 1) * n + (i - 1)] = bispectrum(&spec, k3e, w1, w2);
            }
        }
        let got = k3_star(&spec, &i3, t).unwrap();
        let frac = (t as f64 - 1.0) / t as f64;
        assert_relative_eq!(got, k3e * frac * frac, epsilon = 1e-10, max_relative = 1e-10);
    }

    #[test]
    fn starred_cumulants_reject_nonstationary_specs() {
        let bad = ModelSpec::trial(Family::Causal, 1, 0, &[1.4]).unwrap();
        assert!(k2_star(&bad, &[1.0, 1.0]).is_err());
    }
}
