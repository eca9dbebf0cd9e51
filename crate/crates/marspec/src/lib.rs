//! Frequency-domain estimation and identification of causal, noncausal, and
//! mixed autoregressions.
//!
//! An autoregression driven by non-Gaussian noise can run on lags, on leads,
//! or on both at once — and the data can tell these apart. The spectrum
//! cannot (a model and its time-reversal share it), but the bispectrum can.
//! This crate estimates all candidate directions of an autoregression by
//! minimizing a joint spectrum/bispectrum distance and selects the one the
//! data supports.
//!
//! # Quick start
//!
//! Simulate a two-sided autoregression driven by heavy-tailed noise, then
//! recover its shape and coefficients from the draw alone:
//!
//! ```
//! use marspec::model::ModelSpec;
//! use marspec::simulate::{simulate_series, StableParams};
//! use marspec::strategy::{estimate_candidates, EstimateOptions};
//!
//! let truth = ModelSpec::mixed(vec![0.7], vec![0.2])?;
//! let noise = StableParams::new(1.5, 0.25, 1.0, 0.0)?;
//! let y = simulate_series(&truth, &noise, 200, 42)?;
//!
//! let report = estimate_candidates(&y, 2, &EstimateOptions::default())?;
//! let best = report.selected_fit();
//! assert_eq!((best.r, best.s), (1, 1)); // one lag, one lead
//! # Ok::<(), marspec::Error>(())
//! ```
//!
//! See the guide in `book/` for concept chapters; the modules below mirror
//! its structure, and every snippet in the guide is a doc-test here.

pub mod error;
pub mod model;
pub mod pipeline;
pub mod spectral;
pub mod objective;
pub mod optimize;
pub mod simulate;
pub mod strategy;
pub mod theory;

mod poly;
mod util;

pub use error::{Error, Result};
pub use model::{Family, ModelSpec};
