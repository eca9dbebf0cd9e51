//! Initial-value construction per family, candidate enumeration over
//! `(r, s)` with `r + s = p`, and identification by smallest criterion value.
//!
//! The preliminary fit is a lag-only autoregression, so its polynomial is the
//! *causal representation* of whatever model actually generated the data.
//! When that polynomial has exactly `r` roots outside and `s` inside the unit
//! circle, the factorization map recovers tailored starting values directly.
//! On real data the preliminary polynomial usually has *all* roots outside
//! (the two-sided dynamics fold into their root-inverted image), so the
//! factorization is infeasible. The fallback repairs the split by radial
//! surgery: the `s` most remote roots are shrunk to modulus 0.95 and handed
//! to the forward-looking side. The remote roots are the ones whose lag-side
//! placement the data constrains least (their spectral factors are flattest),
//! so they are the cheapest to re-orient, while the dominant roots keep the
//! lag-side position the preliminary fit found for them. Each candidate is
//! optimized from its single tailored start; a candidate whose run fails to
//! converge stays in the report but is excluded from selection.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{factor_initial_values, CausalRepresentation, Family};
use crate::objective::{ObjectiveContext, ObjectiveOptions};
use crate::optimize::{minimize_rt, BfgsOptions, EstimationResult};
use crate::poly;

/// How a starting vector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    /// Direct mapping from the preliminary fit (identity or root
    /// factorization with the expected inside/outside split).
    Mapped,
    /// The exact factorization was infeasible; the start was rebuilt by
    /// radial surgery on the preliminary roots (or, failing that, from a
    /// whole-unit partition or bare moduli).
    Fallback,
}

/// A candidate starting vector in coefficient order `(phi..., varphi...)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartPoint {
    pub theta: Vec<f64>,
    pub kind: StartKind,
}

/// Pushes a root radially outside the unit circle if it is not already.
fn fix_outside(z: Complex64) -> Complex64 {
    let m = z.norm();
    if m < 1.0 + 1e-6 {
        z * (1.05 / m.max(1e-12))
    } else {
        z
    }
}

/// Groups roots into conjugate-closed units (real singletons and idealized
/// conjugate pairs) so partitions always rebuild into real polynomials.
fn conjugate_units(roots: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut sorted: Vec<Complex64> = roots.to_vec();
    sorted.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.abs().total_cmp(&b.im.abs()))
    });
    let mut used = vec![false; sorted.len()];
    let mut units = Vec::new();
    for i in 0..sorted.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let zi = sorted[i];
        if zi.im.abs() <= 1e-9 * zi.norm().max(1.0) {
            units.push(vec![Complex64::new(zi.re, 0.0)]);
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (j, zj) in sorted.iter().enumerate().skip(i + 1) {
            if used[j] {
                continue;
            }
            let d = (zj - zi.conj()).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) if d <= 1e-6 * zi.norm().max(1.0) => {
                used[j] = true;
                units.push(vec![zi, zi.conj()]);
            }
            _ => {
                // Orphaned complex eigenvalue (numerical noise): keep its
                // magnitude on the real axis.
                units.push(vec![Complex64::new(zi.norm(), 0.0)]);
            }
        }
    }
    units
}

/// All conjugate-closed splits of the preliminary roots into a causal block
/// of `r` and a noncausal block of `s`, each rebuilt as a stationary real
/// polynomial. Sorted so the split sending the smallest-modulus roots to the
/// noncausal side comes first; deduplicated.
fn partition_starts(theta_bar: &[f64], r: usize, s: usize) -> Result<Vec<Vec<f64>>> {
    let mut roots = poly::roots(theta_bar)?;
    // A short root list means trailing coefficients vanished; pad with very
    // remote roots, whose coefficient contribution is negligible.
    while roots.len() < r + s {
        roots.push(Complex64::new(1e3, 0.0));
    }
    let units = conjugate_units(&roots);
    let mut keyed: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for mask in 0u32..(1u32 << units.len()) {
        let size: usize = units
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, u)| u.len())
            .sum();
        if size != s {
            continue;
        }
        let mut causal_roots = Vec::with_capacity(r);
        let mut noncausal_roots = Vec::with_capacity(s);
        for (k, unit) in units.iter().enumerate() {
            let side = if mask >> k & 1 == 1 {
                &mut noncausal_roots
            } else {
                &mut causal_roots
            };
            side.extend(unit.iter().copied().map(fix_outside));
        }
        let build = |zs: &[Complex64]| -> Result<Vec<f64>> {
            if zs.is_empty() {
                Ok(Vec::new())
            } else {
                poly::coeffs_from_roots(zs)
            }
        };
        let (Ok(phi), Ok(vphi)) = (build(&causal_roots), build(&noncausal_roots)) else {
            continue;
        };
        let mut key: Vec<f64> = noncausal_roots.iter().map(|z| z.norm()).collect();
        key.sort_by(f64::total_cmp);
        let mut theta = phi;
        theta.extend_from_slice(&vphi);
        keyed.push((key, theta));
    }
    keyed.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (_, theta) in keyed {
        let dup = out
            .iter()
            .any(|t| t.iter().zip(&theta).all(|(a, b)| (a - b).abs() < 1e-10));
        if !dup {
            out.push(theta);
        }
    }
    Ok(out)
}

/// Start from radial surgery on the preliminary roots: the `s` most remote
/// ones are shrunk to modulus 0.95 (phase kept) so the inside/outside split
/// the factorization map expects holds by construction. The causal side
/// keeps the untouched roots; each shrunk root is reciprocated onto the
/// forward-looking side. Remote roots are the cheapest to re-orient: they
/// carry the flattest spectral factors, so moving them across the unit
/// circle perturbs the fitted spectrum least.
fn shrunk_start(theta_bar: &[f64], r: usize, s: usize) -> Result<Vec<f64>> {
    let mut roots = poly::roots(theta_bar)?;
    while roots.len() < r + s {
        roots.push(Complex64::new(1e3, 0.0));
    }
    let mut units = conjugate_units(&roots); // ascending modulus
    units.reverse();
    let mut inside: Vec<Complex64> = Vec::new();
    let mut outside: Vec<Complex64> = Vec::new();
    let mut need = s;
    for unit in units {
        if unit.len() <= need {
            need -= unit.len();
            inside.extend(unit.iter().map(|z| z * (0.95 / z.norm().max(1e-12))));
        } else {
            outside.extend(unit.iter().copied().map(fix_outside));
        }
    }
    if need != 0 {
        return Err(Error::PreliminaryFit(
            "no conjugate-closed shrink reaches the required split".into(),
        ));
    }
    let phi = if r == 0 {
        Vec::new()
    } else {
        poly::coeffs_from_roots(&outside)?
    };
    let recip: Vec<Complex64> = inside.iter().map(|z| 1.0 / z).collect();
    let vphi = poly::coeffs_from_roots(&recip)?;
    let mut theta = phi;
    theta.extend_from_slice(&vphi);
    Ok(theta)
}

/// Last-resort start when no conjugate-closed partition exists (for example
/// a lone complex pair that an `(1,1)` split would have to cut): root moduli
/// are kept, phases dropped.
fn modulus_collapse(theta_bar: &[f64], r: usize, s: usize) -> Result<Vec<f64>> {
    let mut moduli: Vec<f64> = poly::roots(theta_bar)?
        .iter()
        .map(|z| z.norm().max(1.05))
        .collect();
    while moduli.len() < r + s {
        moduli.push(1e3);
    }
    moduli.sort_by(f64::total_cmp);
    let to_real = |ms: &[f64]| -> Vec<Complex64> {
        ms.iter().map(|&m| Complex64::new(m, 0.0)).collect()
    };
    let vphi = if s == 0 {
        Vec::new()
    } else {
        poly::coeffs_from_roots(&to_real(&moduli[..s]))?
    };
    let phi = if r == 0 {
        Vec::new()
    } else {
        poly::coeffs_from_roots(&to_real(&moduli[s..s + r]))?
    };
    let mut theta = phi;
    theta.extend_from_slice(&vphi);
    Ok(theta)
}

/// The tailored starting value for one candidate shape, derived from the
/// preliminary lag-only fit `theta_bar`.
///
/// Causal candidates start at `theta_bar` itself (reflected stationary if
/// the preliminary fit is explosive). Noncausal and mixed candidates first
/// try the exact root factorization (`r` outside, `s` inside); when that
/// split does not hold — the usual situation, since the preliminary
/// polynomial generally has all roots outside — the start is rebuilt by
/// radial surgery ([`StartKind::Fallback`]): the `s` most remote roots are
/// shrunk to modulus 0.95 and reciprocated onto the forward-looking side.
pub fn initial_values(family: Family, r: usize, s: usize, theta_bar: &[f64]) -> Result<StartPoint> {
    if theta_bar.len() != r + s {
        return Err(Error::InvalidParameter(format!(
            "preliminary fit has {} coefficients but candidate order is {}",
            theta_bar.len(),
            r + s
        )));
    }
    match (family, r, s) {
        (Family::Causal, r, 0) if r >= 1 => {
            if poly::is_stationary(theta_bar)? {
                return Ok(StartPoint {
                    theta: theta_bar.to_vec(),
                    kind: StartKind::Mapped,
                });
            }
            // Explosive preliminary fit: reflect the offending roots.
            let theta = partition_starts(theta_bar, r, 0)?
                .into_iter()
                .next()
                .ok_or_else(|| Error::PreliminaryFit("no stationary causal start".into()))?;
            Ok(StartPoint {
                theta,
                kind: StartKind::Fallback,
            })
        }
        (Family::Noncausal, 0, s) if s >= 1 => two_sided_start(theta_bar, 0, s),
        (Family::Mixed, r, s) if r >= 1 && s >= 1 => two_sided_start(theta_bar, r, s),
        _ => Err(Error::InvalidParameter(format!(
            "family {family} is inconsistent with orders ({r},{s})"
        ))),
    }
}

/// Factorization when the split already holds, radial shrink otherwise.
fn two_sided_start(theta_bar: &[f64], r: usize, s: usize) -> Result<StartPoint> {
    let rep = CausalRepresentation {
        coeffs: theta_bar.to_vec(),
        scale: 1.0,
    };
    if let Ok(spec) = factor_initial_values(&rep, r, s) {
        return Ok(StartPoint {
            theta: spec.params(),
            kind: StartKind::Mapped,
        });
    }
    if let Ok(theta) = shrunk_start(theta_bar, r, s) {
        return Ok(StartPoint {
            theta,
            kind: StartKind::Fallback,
        });
    }
    // No conjugate-closed shrink exists (for example a lone complex pair
    // that a (1,1) split would have to cut): fall back to a whole-unit
    // partition, then to bare root moduli.
    let theta = match partition_starts(theta_bar, r, s)?.into_iter().next() {
        Some(theta) => theta,
        None => modulus_collapse(theta_bar, r, s)?,
    };
    Ok(StartPoint {
        theta,
        kind: StartKind::Fallback,
    })
}

/// Options for candidate estimation: criterion weights plus optimizer knobs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub objective: ObjectiveOptions,
    pub bfgs: BfgsOptions,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            objective: ObjectiveOptions::default(),
            bfgs: BfgsOptions::default(),
        }
    }
}

/// One estimated candidate within an identification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateFit {
    pub family: Family,
    pub r: usize,
    pub s: usize,
    /// Starting vector the optimization ran from.
    pub start: Vec<f64>,
    pub start_kind: StartKind,
    pub result: EstimationResult,
}

/// Outcome of estimating every candidate of total order `p` on one series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentificationReport {
    pub p: usize,
    /// All candidates with `r + s = p`, in decreasing causal order `r`.
    pub candidates: Vec<CandidateFit>,
    /// Index into `candidates` of the smallest criterion value.
    pub selected: usize,
    /// Criterion distance of each candidate from the winner.
    pub margins: Vec<f64>,
}

impl IdentificationReport {
    pub fn selected_fit(&self) -> &CandidateFit {
        &self.candidates[self.selected]
    }
}

fn estimate_one(
    ctx: &ObjectiveContext,
    family: Family,
    r: usize,
    s: usize,
    opts: &EstimateOptions,
) -> Result<CandidateFit> {
    let sp = initial_values(family, r, s, ctx.theta_bar())?;
    let result = minimize_rt(ctx, family, r, s, &sp.theta, &opts.bfgs)?;
    Ok(CandidateFit {
        family,
        r,
        s,
        start: sp.theta,
        start_kind: sp.kind,
        result,
    })
}

/// Estimates every candidate shape with `r + s = p` on `y` — one criterion
/// context, tailored starts per candidate — and selects the smallest
/// criterion value. Candidates that fail to converge stay in the report but
/// are excluded from selection.
///
/// ```
/// use marspec::model::ModelSpec;
/// use marspec::simulate::{simulate_series, StableParams};
/// use marspec::strategy::{estimate_candidates, EstimateOptions};
///
/// let truth = ModelSpec::noncausal(vec![0.7, 0.2])?;
/// let noise = StableParams::new(1.5, 0.25, 1.0, 0.0)?;
/// let y = simulate_series(&truth, &noise, 300, 11)?;
///
/// let report = estimate_candidates(&y, 2, &EstimateOptions::default())?;
/// assert_eq!(report.candidates.len(), 3); // (2,0), (1,1), (0,2)
/// let best = report.selected_fit();
/// assert_eq!((best.r, best.s), (0, 2)); // the lead-only candidate wins
/// # Ok::<(), marspec::Error>(())
/// ```
pub fn estimate_candidates(
    y: &[f64],
    p: usize,
    opts: &EstimateOptions,
) -> Result<IdentificationReport> {
    if p == 0 {
        return Err(Error::EmptyOrder);
    }
    let ctx = ObjectiveContext::build(y, p, opts.objective)?;
    let shapes: Vec<(Family, usize, usize)> = (0..=p)
        .rev()
        .map(|r| {
            let s = p - r;
            let family = match (r, s) {
                (_, 0) => Family::Causal,
                (0, _) => Family::Noncausal,
                _ => Family::Mixed,
            };
            (family, r, s)
        })
        .collect();
    let candidates: Vec<CandidateFit> = shapes
        .par_iter()
        .map(|&(family, r, s)| estimate_one(&ctx, family, r, s, opts))
        .collect::<Result<Vec<_>>>()?;

    let best_rt = candidates
        .iter()
        .filter(|c| c.result.converged && c.result.rt.is_finite())
        .map(|c| c.result.rt)
        .min_by(f64::total_cmp)
        .ok_or(Error::NoConvergedCandidate)?;
    // Near-ties resolve toward the more causal candidate (larger r), which is
    // the first qualifying entry in decreasing-r order.
    let selected = candidates
        .iter()
        .position(|c| c.result.converged && c.result.rt <= best_rt + 1e-9)
        .expect("a converged candidate attains the minimum");
    let margins = candidates
        .iter()
        .map(|c| c.result.rt - candidates[selected].result.rt)
        .collect();
    Ok(IdentificationReport {
        p,
        candidates,
        selected,
        margins,
    })
}
