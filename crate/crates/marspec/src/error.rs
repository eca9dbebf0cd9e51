//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, estimation, simulation, and the
/// data pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A coefficient vector that must be non-empty was empty.
    #[error("model order must be at least 1 (got an empty coefficient vector)")]
    EmptyOrder,

    /// The highest-order coefficient is too close to zero for the requested
    /// operation (division by it would be ill-conditioned).
    #[error("degenerate order: |{name}| = {value:.3e} is below the {floor:.1e} floor")]
    DegenerateOrder {
        name: &'static str,
        value: f64,
        floor: f64,
    },

    /// A lag (or lead) polynomial has a root on or inside the unit circle.
    #[error("non-stationary polynomial: minimum root modulus {min_modulus:.6} (needs > 1)")]
    NonStationary { min_modulus: f64 },

    /// A polynomial root lies numerically on the unit circle, so it cannot be
    /// classified as causal or noncausal.
    #[error("root modulus {modulus:.10} is on the unit-circle boundary (within {guard:.1e})")]
    UnitRootBoundary { modulus: f64, guard: f64 },

    /// Root factoring produced a different inside/outside split than the
    /// requested (r, s) orders.
    #[error(
        "root partition infeasible: requested {expected_outside} roots outside / \
         {expected_inside} inside the unit circle, found {found_outside}/{found_inside}"
    )]
    RootPartition {
        expected_outside: usize,
        expected_inside: usize,
        found_outside: usize,
        found_inside: usize,
    },

    /// Reassembling real coefficients from a root multiset left a residual
    /// imaginary part, i.e. the roots were not conjugate-closed.
    #[error("root multiset is not conjugate-closed: residual imaginary magnitude {residual:.3e}")]
    ComplexResidual { residual: f64 },

    /// Series input contained NaN or infinity.
    #[error("non-finite value in series at index {index}")]
    NonFiniteData { index: usize },

    /// Series too short for the requested operation.
    #[error("series too short: {got} observations, need at least {needed}")]
    SeriesTooShort { needed: usize, got: usize },

    /// A series was constant (zero variance) where variation is required.
    #[error("series has (near-)zero variance")]
    ZeroVariance,

    /// Invalid scalar parameter (weights, stable-law parameters, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The preliminary autoregressive fit could not produce a stationary
    /// coefficient vector.
    #[error("preliminary fit failed: {0}")]
    PreliminaryFit(String),

    /// Numerical quadrature did not reach the requested tolerance.
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    /// An optimizer was started at an infeasible (non-stationary) point.
    #[error("optimization start is non-stationary or has non-finite objective")]
    InfeasibleStart,

    /// Every candidate in an identification scan failed to converge.
    #[error("no candidate converged during identification")]
    NoConvergedCandidate,

    /// CSV column not found.
    #[error("column {name:?} not found; available: {available:?}")]
    MissingColumn { name: String, available: Vec<String> },

    /// A CSV row could not be parsed.
    #[error("bad row {row}: {reason}")]
    BadRow { row: usize, reason: String },

    /// Underlying CSV reader error.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// Underlying I/O error.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenient crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
