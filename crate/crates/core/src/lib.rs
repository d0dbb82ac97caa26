//! Equitability analysis for measures of dependence.
//!
//! A statistic is *equitable* with respect to a strength measure (here the
//! coefficient of determination R² against the generating function) when its
//! value pins down that strength regardless of the relationship type. This
//! crate estimates equitability empirically:
//!
//! 1. [`relationships`] draws noisy functional relationships whose noise is
//!    calibrated to a uniform grid of R² values.
//! 2. [`measures`] evaluates dependence statistics on each sample.
//! 3. [`analysis`] turns the Monte Carlo sampling distributions into reliable
//!    intervals, interpretable intervals, power surfaces and detection
//!    thresholds.
//! 4. [`report`] writes CSV/JSON tables and SVG figures.
//! 5. [`pipeline`] wires everything together behind a declarative config.

pub mod analysis;
pub mod config;
mod error;
pub mod measures;
pub mod pipeline;
pub mod relationships;
pub mod report;
pub mod seed;

pub use error::{Error, Result};
