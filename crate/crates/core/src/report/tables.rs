use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    quantile, ConsistencyReport, DetectionReport, Equitability, IntervalTable, PowerSurface, ScoreGrid, Threshold,
};
use crate::measures::{OutputUnit, StatisticDescriptor};
use crate::{Error, Result};

/// Numbers in CSV files: 17 significant digits, so every f64 round-trips.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Everything that determines the numbers of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub software_version: String,
    pub preset: String,
    pub design: String,
    pub noise: String,
    pub r2_mode: String,
    pub statistics: Vec<StatisticDescriptor>,
    pub functions: Vec<String>,
    pub n: usize,
    pub replicates: usize,
    pub r2_levels: usize,
    pub y_grid_size: usize,
    pub alpha: f64,
    pub beta: f64,
    pub calibration_tol: f64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidestInterval {
    pub y: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub alpha: f64,
    pub beta: f64,
    pub critical_value: f64,
    pub threshold: Threshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencySummary {
    pub max_discrepancy_steps: f64,
    pub rows_checked: usize,
    pub monotonicity_violations: usize,
}

/// Contents of `summary.json` for one statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub statistic: StatisticDescriptor,
    pub output_unit: OutputUnit,
    pub alpha: f64,
    /// Level of the right-tailed tests behind the power surface.
    pub test_level: f64,
    pub y_grid_size: usize,
    pub y_range: (f64, f64),
    pub worst_case_width: f64,
    pub average_case_width: f64,
    pub worst_case_equitability: Equitability,
    pub average_case_equitability: Equitability,
    pub widest_interpretable: WidestInterval,
    pub average_power: Option<f64>,
    pub detection: DetectionSummary,
    pub consistency: ConsistencySummary,
    pub failed_replicates: usize,
    pub manifest: RunManifest,
}

impl Summary {
    pub fn new(
        grid: &ScoreGrid,
        output_unit: OutputUnit,
        table: &IntervalTable,
        surface: &PowerSurface,
        detection: &DetectionReport,
        consistency: &ConsistencyReport,
        manifest: RunManifest,
    ) -> Self {
        let widest = &table.interpretable[table.widest];
        Summary {
            statistic: grid.statistic.clone(),
            output_unit,
            alpha: table.alpha,
            test_level: surface.alpha,
            y_grid_size: table.interpretable.len(),
            y_range: table.y_range,
            worst_case_width: table.worst_case_width,
            average_case_width: table.average_case_width,
            worst_case_equitability: table.worst_case_equitability,
            average_case_equitability: table.average_case_equitability,
            widest_interpretable: WidestInterval {
                y: widest.y,
                lo: widest.interval.lo,
                hi: widest.interval.hi,
            },
            average_power: surface.average_power(),
            detection: DetectionSummary {
                alpha: detection.alpha,
                beta: detection.beta,
                critical_value: detection.critical_value,
                threshold: detection.threshold,
            },
            consistency: ConsistencySummary {
                max_discrepancy_steps: consistency.max_discrepancy,
                rows_checked: consistency.checked.len(),
                monotonicity_violations: consistency.monotonicity_violations.len(),
            },
            failed_replicates: grid.failures.iter().flatten().sum(),
            manifest,
        }
    }

    /// Canonical JSON text: sorted keys, two-space indent, trailing newline.
    pub fn to_canonical_json(&self) -> Result<String> {
        canonical_json(&serde_json::to_value(self)?)
    }
}

/// Pretty JSON of a value with object keys sorted; parse and re-emit is a no-op.
pub fn canonical_json(value: &serde_json::Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn quantiles_csv(grid: &ScoreGrid, alpha: f64) -> Result<String> {
    let mut out = String::from("function_id,target_r2,sigma,prob,value\n");
    let probs = [alpha / 2.0, 0.5, 1.0 - alpha / 2.0];
    for (f, id) in grid.functions.iter().enumerate() {
        for (l, level) in grid.levels[f].iter().enumerate() {
            for &p in &probs {
                let v = quantile(&grid.scores[f][l], p)?;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    id,
                    fmt_num(level.target_r2),
                    fmt_num(level.sigma),
                    fmt_num(p),
                    fmt_num(v)
                );
            }
        }
    }
    Ok(out)
}

pub fn intervals_csv(table: &IntervalTable) -> String {
    let mut out = String::from("kind,anchor,lo,hi,flag\n");
    for r in &table.reliable {
        let _ = writeln!(
            out,
            "reliable,{},{},{},",
            fmt_num(r.x),
            fmt_num(r.interval.lo),
            fmt_num(r.interval.hi)
        );
    }
    for r in &table.interpretable {
        let flag = if r.extrapolated { "extrapolated" } else { "" };
        let _ = writeln!(
            out,
            "interpretable,{},{},{},{}",
            fmt_num(r.y),
            fmt_num(r.interval.lo),
            fmt_num(r.interval.hi),
            flag
        );
    }
    out
}

/// One row per grid pair with x₁ strictly above x₀.
pub fn power_csv(surface: &PowerSurface) -> String {
    let mut out = String::from("x0,x1,power,critical_value\n");
    for row in &surface.rows {
        for &(x1, p) in row.power.iter().filter(|(x1, _)| *x1 > row.x0) {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_num(row.x0),
                fmt_num(x1),
                fmt_num(p),
                fmt_num(row.critical_value)
            );
        }
    }
    out
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes quantiles.csv, intervals.csv, power.csv and summary.json into `out_dir`.
pub fn write_tables(
    grid: &ScoreGrid,
    table: &IntervalTable,
    surface: &PowerSurface,
    summary: &Summary,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = [
        ("quantiles.csv", quantiles_csv(grid, table.alpha)?),
        ("intervals.csv", intervals_csv(table)),
        ("power.csv", power_csv(surface)),
        ("summary.json", summary.to_canonical_json()?),
    ];
    let mut written = Vec::new();
    for (name, text) in files {
        let path = out_dir.join(name);
        write_file(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5e-7, 0.0] {
            let back: f64 = fmt_num(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(0.5), "5.0000000000000000e-1");
    }
}
