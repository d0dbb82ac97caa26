//! Noisy functional relationships: the function catalog, marginal designs,
//! sample generation and noise calibration against an R² grid.

mod calibrate;
mod catalog;
mod design;
mod model;

pub use calibrate::{
    calibrate_levels, calibrate_sigma, r2_grid, CalibratedLevel, CalibrationOptions, DEFAULT_MAX_ITER,
    DEFAULT_MC_POINTS, DEFAULT_TOL,
};
pub use catalog::{default_catalog, lookup, CatalogEntry, FunctionSpec};
pub use design::{arc_length_design, arc_length_to, ARC_GRID};
pub use model::{
    generate_sample, population_r2, signal_variance, DesignKind, MarginalDesign, NoiseKind, NoiseModel, R2Curve,
    R2Mode, RelationshipModel, MIN_MC_POINTS,
};
