//! Polynomial helpers shared by the model-algebra and estimation modules.
//!
//! Every autoregressive polynomial in this crate is stored by its coefficient
//! vector `c = (c_1, ..., c_k)` and denotes
//!
//! ```text
//!     p(z) = 1 - c_1 z - c_2 z^2 - ... - c_k z^k .
//! ```
//!
//! Stationarity of the associated recursion means all roots of `p` lie
//! strictly outside the unit circle.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots that land within this distance of the unit circle cannot be
/// classified as inside/outside.
pub(crate) const UNIT_CIRCLE_GUARD: f64 = 1e-8;

/// Floor below which a leading coefficient counts as zero for division.
pub(crate) const LEADING_COEF_FLOOR: f64 = 1e-6;

/// Residual imaginary mass allowed when reassembling real coefficients from
/// a conjugate-closed root multiset.
pub(crate) const IMAG_RESIDUAL_TOL: f64 = 1e-10;

/// Roots of `1 - c_1 z - ... - c_k z^k`, computed as eigenvalues of the
/// companion matrix of the monic rescaling. Trailing (exactly) zero
/// coefficients are trimmed first; an all-zero vector has no roots.
pub(crate) fn roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    if coeffs.is_empty() {
        return Err(Error::EmptyOrder);
    }
    let k = match coeffs.iter().rposition(|&c| c != 0.0) {
        Some(idx) => idx + 1,
        None => return Ok(Vec::new()), // p(z) = 1: no roots
    };
    let c = &coeffs[..k];
    if k == 1 {
        return Ok(vec![Complex64::new(1.0 / c[0], 0.0)]);
    }
    // Monic form: z^k + a_{k-1} z^{k-1} + ... + a_1 z + a_0 with
    // a_j = c_j / c_k (1 <= j < k) and a_0 = -1 / c_k.
    let ck = c[k - 1];
    let mut companion = DMatrix::<f64>::zeros(k, k);
    for i in 1..k {
        companion[(i, i - 1)] = 1.0;
    }
    companion[(0, k - 1)] = 1.0 / ck; // -a_0
    for j in 1..k {
        companion[(j, k - 1)] = -c[j - 1] / ck; // -a_j in row j
    }
    // The companion matrix above is transposed relative to the textbook
    // layout; eigenvalues are unaffected.
    let eig = companion.complex_eigenvalues();
    Ok(eig.iter().copied().collect())
}

/// Minimum root modulus of `1 - c_1 z - ... - c_k z^k`; `None` when the
/// polynomial is constant (no roots).
pub(crate) fn min_root_modulus(coeffs: &[f64]) -> Result<Option<f64>> {
    let rs = roots(coeffs)?;
    Ok(rs
        .iter()
        .map(|r| r.norm())
        .min_by(|a, b| a.total_cmp(b)))
}

/// Checks that all roots lie strictly outside the unit circle.
pub(crate) fn is_stationary(coeffs: &[f64]) -> Result<bool> {
    match min_root_modulus(coeffs)? {
        None => Ok(true),
        Some(m) => Ok(m > 1.0),
    }
}

/// Rebuilds real coefficients `(c_1, ..., c_k)` of `prod_i (1 - z / rho_i)`
/// from a conjugate-closed root multiset.
pub(crate) fn coeffs_from_roots(roots: &[Complex64]) -> Result<Vec<f64>> {
    // Accumulate the monomial expansion of prod (1 - z/rho) in full complex
    // arithmetic, then check the imaginary residue.
    let mut acc: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    for rho in roots {
        if rho.norm() == 0.0 {
            return Err(Error::InvalidParameter(
                "polynomial root at zero cannot arise from constant term 1".into(),
            ));
        }
        let factor = -1.0 / rho; // (1 - z/rho) = 1 + factor * z
        let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
        for (i, &a) in acc.iter().enumerate() {
            next[i] += a;
            next[i + 1] += a * factor;
        }
        acc = next;
    }
    let scale = acc
        .iter()
        .map(|c| c.norm())
        .fold(1.0_f64, f64::max);
    let residual = acc
        .iter()
        .map(|c| c.im.abs())
        .fold(0.0_f64, f64::max);
    if residual > IMAG_RESIDUAL_TOL * scale {
        return Err(Error::ComplexResidual { residual });
    }
    // acc[0] = 1; the stored convention negates higher coefficients.
    Ok(acc[1..].iter().map(|c| -c.re).collect())
}

/// Splits a conjugate-closed root multiset by the unit circle. Errors when a
/// root sits on the boundary (within [`UNIT_CIRCLE_GUARD`]).
pub(crate) fn split_by_unit_circle(
    roots: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut outside = Vec::new();
    let mut inside = Vec::new();
    for &r in roots {
        let m = r.norm();
        if (m - 1.0).abs() <= UNIT_CIRCLE_GUARD {
            return Err(Error::UnitRootBoundary {
                modulus: m,
                guard: UNIT_CIRCLE_GUARD,
            });
        }
        if m > 1.0 {
            outside.push(r);
        } else {
            inside.push(r);
        }
    }
    Ok((outside, inside))
}
