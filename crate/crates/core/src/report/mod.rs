//! Result tables (CSV/JSON) and SVG figures.

mod svg;
mod tables;

pub use svg::{interval_plot_svg, power_heatmap_svg, ramp_color, render_interval_plot, render_power_heatmap, RAMP};
pub use tables::{
    canonical_json, fmt_num, intervals_csv, power_csv, quantiles_csv, write_tables, ConsistencySummary,
    DetectionSummary, RunManifest, Summary, WidestInterval,
};
