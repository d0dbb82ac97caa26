//! Stage-wise experiment driver: calibrate → grid → analyze → render.
//!
//! Stages communicate only through archives under `<output_dir>/archive/`,
//! named by hashes of the fields they depend on, so running the stages one by
//! one writes the same bytes as [`run`].

use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    build_score_grid, detection_threshold, equitability_summary, power_surface, theorem1_consistency,
    ConsistencyReport, DetectionReport, IntervalTable, PowerSurface, ScoreGrid, SuiteEntry,
};
use crate::config::ExperimentConfig;
use crate::measures::{Registry, StatisticDescriptor};
use crate::relationships::{
    calibrate_levels, CalibratedLevel, CalibrationOptions, DEFAULT_MAX_ITER, DEFAULT_MC_POINTS,
};
use crate::report::{render_interval_plot, render_power_heatmap, write_tables, RunManifest, Summary};
use crate::seed::{mix, str_key};
use crate::{Error, Result};

pub const CALIBRATION_ARCHIVE_VERSION: u32 = 1;

/// Calibrated noise levels for every configured function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationArchive {
    pub version: u32,
    pub hash: String,
    pub functions: Vec<String>,
    pub levels: Vec<Vec<CalibratedLevel>>,
}

/// Everything computed from one score grid.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub table: IntervalTable,
    pub surface: PowerSurface,
    pub detection: DetectionReport,
    pub consistency: ConsistencyReport,
    pub summary: Summary,
}

pub fn archive_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir.join("archive")
}

pub fn calibration_path(cfg: &ExperimentConfig) -> PathBuf {
    archive_dir(cfg).join(format!("calibration-{}.json", &cfg.calibration_hash()[..16]))
}

pub fn grid_path(cfg: &ExperimentConfig, statistic: &StatisticDescriptor) -> PathBuf {
    archive_dir(cfg).join(format!(
        "grid-{}-{}.json",
        statistic.file_stem(),
        &cfg.grid_hash(statistic)[..16]
    ))
}

/// Directory holding the tables and figures of one statistic.
pub fn statistic_dir(cfg: &ExperimentConfig, statistic: &StatisticDescriptor) -> PathBuf {
    cfg.output_dir.join(statistic.file_stem())
}

fn write_archive<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let dir = path.parent().expect("archive paths have a parent");
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_string(value)?).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Calibrates σ on the R² grid for every function, reusing a cached archive.
pub fn calibrate(cfg: &ExperimentConfig) -> Result<CalibrationArchive> {
    let path = calibration_path(cfg);
    if path.exists() {
        info!("calibration: cached {}", path.display());
        return load_calibration(cfg);
    }
    info!(
        "calibration: {} functions x {} levels",
        cfg.functions.len(),
        cfg.r2_levels
    );
    let templates = cfg.templates()?;
    let levels = templates
        .par_iter()
        .map(|t| {
            let opts = CalibrationOptions {
                mode: cfg.r2_mode,
                tol: cfg.calibration_tol,
                max_iter: DEFAULT_MAX_ITER,
                mc_points: DEFAULT_MC_POINTS,
                seed: mix(&[cfg.master_seed, str_key("calibration"), str_key(t.function.id)]),
            };
            calibrate_levels(t, cfg.r2_levels, &opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let archive = CalibrationArchive {
        version: CALIBRATION_ARCHIVE_VERSION,
        hash: cfg.calibration_hash(),
        functions: cfg.functions.clone(),
        levels,
    };
    write_archive(&path, &archive)?;
    Ok(archive)
}

/// Loads the calibration archive written by [`calibrate`].
pub fn load_calibration(cfg: &ExperimentConfig) -> Result<CalibrationArchive> {
    let path = calibration_path(cfg);
    if !path.exists() {
        return Err(Error::MissingArchive(path));
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let archive: CalibrationArchive = serde_json::from_str(&text)?;
    if archive.version != CALIBRATION_ARCHIVE_VERSION {
        return Err(Error::ArchiveVersion {
            path,
            found: archive.version,
            expected: CALIBRATION_ARCHIVE_VERSION,
        });
    }
    if archive.hash != cfg.calibration_hash() || archive.functions != cfg.functions {
        return Err(Error::InvalidGrid(format!(
            "{} does not match the config",
            path.display()
        )));
    }
    Ok(archive)
}

/// Pairs the configured templates with their calibrated levels.
pub fn suite(cfg: &ExperimentConfig, calibration: &CalibrationArchive) -> Result<Vec<SuiteEntry>> {
    Ok(cfg
        .templates()?
        .into_iter()
        .zip(&calibration.levels)
        .map(|(template, levels)| SuiteEntry {
            template,
            levels: levels.clone(),
        })
        .collect())
}

/// Builds (or loads) the score grid of one statistic. Needs the calibration archive.
pub fn grid(cfg: &ExperimentConfig, registry: &Registry, statistic: &StatisticDescriptor) -> Result<ScoreGrid> {
    let path = grid_path(cfg, statistic);
    if path.exists() {
        info!("grid {statistic}: cached {}", path.display());
        return ScoreGrid::load_json(&path);
    }
    let calibration = load_calibration(cfg)?;
    let suite = suite(cfg, &calibration)?;
    info!(
        "grid {statistic}: {} functions x {} levels x {} replicates",
        suite.len(),
        cfg.r2_levels,
        cfg.replicates
    );
    let grid = build_score_grid(registry, statistic, &suite, cfg.replicates, cfg.master_seed)?;
    write_archive(&path, &grid)?;
    Ok(grid)
}

/// Loads the grid archive of one statistic without building it.
pub fn load_grid(cfg: &ExperimentConfig, statistic: &StatisticDescriptor) -> Result<ScoreGrid> {
    let grid = ScoreGrid::load_json(&grid_path(cfg, statistic))?;
    if &grid.statistic != statistic {
        return Err(Error::InvalidGrid(format!(
            "archive holds {} instead of {statistic}",
            grid.statistic
        )));
    }
    Ok(grid)
}

pub fn manifest(cfg: &ExperimentConfig) -> RunManifest {
    let name = |v: serde_json::Value| v.as_str().unwrap_or_default().to_string();
    RunManifest {
        config_hash: cfg.hash(),
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        preset: cfg.preset.name().to_string(),
        design: name(serde_json::to_value(cfg.design).expect("enum serializes")),
        noise: name(serde_json::to_value(cfg.noise).expect("enum serializes")),
        r2_mode: name(serde_json::to_value(cfg.r2_mode).expect("enum serializes")),
        statistics: cfg.statistics.clone(),
        functions: cfg.functions.clone(),
        n: cfg.n,
        replicates: cfg.replicates,
        r2_levels: cfg.r2_levels,
        y_grid_size: cfg.y_grid_size,
        alpha: cfg.alpha,
        beta: cfg.beta,
        calibration_tol: cfg.calibration_tol,
        master_seed: cfg.master_seed,
    }
}

/// Runs every analysis on a grid. Tests use level α/2, the per-tail level of
/// the intervals.
pub fn analyze_grid(cfg: &ExperimentConfig, registry: &Registry, grid: &ScoreGrid) -> Result<Analysis> {
    let test_level = cfg.alpha / 2.0;
    let table = equitability_summary(grid, cfg.alpha, cfg.y_grid_size)?;
    let surface = power_surface(grid, test_level)?;
    let detection = detection_threshold(grid, test_level, cfg.beta)?;
    let consistency = theorem1_consistency(grid, cfg.alpha)?;
    let summary = Summary::new(
        grid,
        registry.output_unit(&grid.statistic)?,
        &table,
        &surface,
        &detection,
        &consistency,
        manifest(cfg),
    );
    Ok(Analysis {
        table,
        surface,
        detection,
        consistency,
        summary,
    })
}

/// Writes tables and summary.json for every statistic from existing grid archives.
pub fn analyze(cfg: &ExperimentConfig, registry: &Registry) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for statistic in &cfg.statistics {
        let grid = load_grid(cfg, statistic)?;
        let a = analyze_grid(cfg, registry, &grid)?;
        info!(
            "{statistic}: worst-case width {:.4}, average width {:.4}, threshold {:?}",
            a.table.worst_case_width, a.table.average_case_width, a.detection.threshold
        );
        written.extend(write_tables(
            &grid,
            &a.table,
            &a.surface,
            &a.summary,
            &statistic_dir(cfg, statistic),
        )?);
    }
    Ok(written)
}

/// Writes the interval plot and power heatmap for every statistic.
pub fn render(cfg: &ExperimentConfig, registry: &Registry) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for statistic in &cfg.statistics {
        let grid = load_grid(cfg, statistic)?;
        let a = analyze_grid(cfg, registry, &grid)?;
        let dir = statistic_dir(cfg, statistic);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let plot = dir.join("interval_plot.svg");
        render_interval_plot(&grid, &a.table, &plot)?;
        let heatmap = dir.join("power_heatmap.svg");
        render_power_heatmap(&a.surface, &statistic.key(), &heatmap)?;
        written.push(plot);
        written.push(heatmap);
    }
    Ok(written)
}

/// All stages end to end.
pub fn run(cfg: &ExperimentConfig, registry: &Registry) -> Result<Vec<PathBuf>> {
    cfg.validate(registry)?;
    calibrate(cfg)?;
    for statistic in &cfg.statistics {
        grid(cfg, registry, statistic)?;
    }
    let mut written = analyze(cfg, registry)?;
    written.extend(render(cfg, registry)?);
    Ok(written)
}
