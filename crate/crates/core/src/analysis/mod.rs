//! Equitability analysis over Monte Carlo score grids: reliable and
//! interpretable intervals, power surfaces, uncertain sets, detection
//! thresholds and the interval/power consistency check.

mod coverage;
mod detection;
mod grid;
mod intervals;
mod power;
mod quantile;

pub use coverage::{empirical_coverage, CoverageReport};
pub use detection::{detection_threshold, DetectionReport, Threshold};
pub use grid::{build_score_grid, ScoreGrid, SuiteEntry, GRID_ARCHIVE_VERSION, MAX_FAILED_FRACTION, MIN_REPLICATES};
pub use intervals::{
    equitability_summary, interpretable_interval, reliable_curve, reliable_interval, Equitability, Interpretable,
    InterpretableRow, Interval, IntervalTable, ReliableRow,
};
pub use power::{
    critical_value, min_rejection, power_function, power_surface, theorem1_consistency, uncertain_set,
    ConsistencyReport, PowerRow, PowerSurface, RowCheck,
};
pub use quantile::{fraction_above, quantile};
