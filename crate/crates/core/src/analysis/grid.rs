use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::measures::{Registry, StatisticDescriptor};
use crate::relationships::{generate_sample, CalibratedLevel, RelationshipModel};
use crate::seed::{cell_seed, str_key};
use crate::{Error, Result};

pub const GRID_ARCHIVE_VERSION: u32 = 1;
pub const MIN_REPLICATES: usize = 20;
/// A cell aborts the run when more than this fraction of replicates fail.
pub const MAX_FAILED_FRACTION: f64 = 0.01;

/// One relationship type with its calibrated noise levels.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub template: RelationshipModel,
    pub levels: Vec<CalibratedLevel>,
}

/// Monte Carlo sampling distributions of one statistic over a suite of
/// relationships, indexed by (function, R² level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreGrid {
    pub version: u32,
    pub statistic: StatisticDescriptor,
    pub functions: Vec<String>,
    /// Shared target R² grid.
    pub x_grid: Vec<f64>,
    /// `levels[f][l]`
    pub levels: Vec<Vec<CalibratedLevel>>,
    /// `scores[f][l]`, each sorted ascending.
    pub scores: Vec<Vec<Vec<f64>>>,
    /// Replicates per cell whose evaluation failed and were left out.
    pub failures: Vec<Vec<usize>>,
    pub n: usize,
    pub replicates: usize,
    pub master_seed: u64,
}

impl ScoreGrid {
    /// Builds a grid from precomputed score vectors (sorted on entry).
    ///
    /// Useful for synthetic statistics and for tests of the analysis layer.
    pub fn from_scores(
        statistic: StatisticDescriptor,
        functions: Vec<String>,
        x_grid: Vec<f64>,
        mut scores: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        for cell in scores.iter_mut().flatten() {
            cell.sort_by(f64::total_cmp);
        }
        let replicates = scores.first().and_then(|f| f.first()).map_or(0, Vec::len);
        let levels = functions
            .iter()
            .map(|_| {
                x_grid
                    .iter()
                    .map(|&x| CalibratedLevel {
                        target_r2: x,
                        sigma: if x == 0.0 { f64::INFINITY } else { 0.0 },
                        achieved_r2: x,
                        tolerance: 0.0,
                    })
                    .collect()
            })
            .collect();
        let failures = vec![vec![0; x_grid.len()]; functions.len()];
        let grid = ScoreGrid {
            version: GRID_ARCHIVE_VERSION,
            statistic,
            functions,
            x_grid,
            levels,
            scores,
            failures,
            n: 0,
            replicates,
            master_seed: 0,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGrid(msg));
        if self.x_grid.is_empty() || self.functions.is_empty() {
            return bad("grid has no functions or no levels".into());
        }
        if self.scores.len() != self.functions.len() {
            return bad(format!(
                "{} score rows for {} functions",
                self.scores.len(),
                self.functions.len()
            ));
        }
        for (f, row) in self.scores.iter().enumerate() {
            if row.len() != self.x_grid.len() {
                return bad(format!(
                    "function {} has {} levels, grid has {}",
                    self.functions[f],
                    row.len(),
                    self.x_grid.len()
                ));
            }
            for cell in row {
                if cell.is_empty() {
                    return bad(format!("function {} has an empty cell", self.functions[f]));
                }
                if cell.windows(2).any(|w| w[0] > w[1]) {
                    return bad(format!("function {} has an unsorted cell", self.functions[f]));
                }
            }
        }
        for (f, lv) in self.levels.iter().enumerate() {
            if lv.len() != self.x_grid.len() || lv.iter().zip(&self.x_grid).any(|(l, &x)| l.target_r2 != x) {
                return bad(format!(
                    "function {} does not share the target R² grid",
                    self.functions[f]
                ));
            }
        }
        Ok(())
    }

    pub fn num_levels(&self) -> usize {
        self.x_grid.len()
    }

    /// Grid spacing, assuming a uniform grid; 1 for a single level.
    pub fn step(&self) -> f64 {
        if self.x_grid.len() < 2 {
            1.0
        } else {
            (self.x_grid[self.x_grid.len() - 1] - self.x_grid[0]) / (self.x_grid.len() - 1) as f64
        }
    }

    /// Score vectors of every function at one level.
    pub fn cells_at(&self, level: usize) -> impl Iterator<Item = &[f64]> {
        self.scores.iter().map(move |row| row[level].as_slice())
    }

    /// Smallest and largest score anywhere in the grid.
    pub fn score_range(&self) -> (f64, f64) {
        self.scores
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), cell| {
                (lo.min(cell[0]), hi.max(cell[cell.len() - 1]))
            })
    }

    /// Restricts the grid to a subset of its functions, in the given order.
    pub fn select_functions(&self, ids: &[&str]) -> Result<ScoreGrid> {
        let mut out = self.clone();
        out.functions.clear();
        out.levels.clear();
        out.scores.clear();
        out.failures.clear();
        for id in ids {
            let f = self
                .functions
                .iter()
                .position(|g| g == id)
                .ok_or_else(|| Error::UnknownFunction(id.to_string()))?;
            out.functions.push(self.functions[f].clone());
            out.levels.push(self.levels[f].clone());
            out.scores.push(self.scores[f].clone());
            out.failures.push(self.failures[f].clone());
        }
        out.validate()?;
        Ok(out)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArchive(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let grid: ScoreGrid = serde_json::from_str(&text)?;
        if grid.version != GRID_ARCHIVE_VERSION {
            return Err(Error::ArchiveVersion {
                path: path.to_path_buf(),
                found: grid.version,
                expected: GRID_ARCHIVE_VERSION,
            });
        }
        grid.validate()?;
        Ok(grid)
    }
}

/// Runs the Monte Carlo: for every (function, level) cell, draws `replicates`
/// samples and evaluates the statistic on each.
///
/// Replicate r of cell (f, l) uses the seed
/// `cell_seed(master_seed, str_key(statistic.key()), f, l, r)`, so the result
/// does not depend on how rayon schedules the cells.
pub fn build_score_grid(
    registry: &Registry,
    statistic: &StatisticDescriptor,
    suite: &[SuiteEntry],
    replicates: usize,
    master_seed: u64,
) -> Result<ScoreGrid> {
    if replicates < MIN_REPLICATES {
        return Err(Error::config(
            "replicates",
            format!("must be at least {MIN_REPLICATES}, got {replicates}"),
        ));
    }
    registry.validate(statistic)?;
    let first = suite.first().ok_or_else(|| Error::InvalidGrid("empty suite".into()))?;
    let x_grid: Vec<f64> = first.levels.iter().map(|l| l.target_r2).collect();
    for entry in suite {
        if entry.levels.iter().map(|l| l.target_r2).ne(x_grid.iter().copied()) {
            return Err(Error::InvalidGrid(format!(
                "{} is not calibrated on the shared grid",
                entry.template.function.id
            )));
        }
    }
    let stat_key = str_key(&statistic.key());
    let cells: Vec<(usize, usize)> = (0..suite.len())
        .flat_map(|f| (0..x_grid.len()).map(move |l| (f, l)))
        .collect();

    let results: Vec<Result<(Vec<f64>, usize)>> = cells
        .par_iter()
        .map(|&(f, l)| {
            let entry = &suite[f];
            let model = entry.template.with_sigma(entry.levels[l].sigma);
            let mut scores = Vec::with_capacity(replicates);
            let mut failed = 0;
            let mut first_error = None;
            for r in 0..replicates {
                let (sample, _) = generate_sample(&model, cell_seed(master_seed, stat_key, f, l, r));
                match registry.evaluate(statistic, &sample) {
                    Ok(v) if v.is_finite() => scores.push(v),
                    Ok(v) => {
                        failed += 1;
                        first_error.get_or_insert_with(|| format!("non-finite score {v}"));
                    }
                    Err(e) => {
                        failed += 1;
                        first_error.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            if failed as f64 > MAX_FAILED_FRACTION * replicates as f64 {
                return Err(Error::CellFailed {
                    function: entry.template.function.id.to_string(),
                    level: l,
                    failed,
                    total: replicates,
                    first_error: first_error.unwrap_or_default(),
                });
            }
            scores.sort_by(f64::total_cmp);
            Ok((scores, failed))
        })
        .collect();

    let mut scores = vec![Vec::with_capacity(x_grid.len()); suite.len()];
    let mut failures = vec![Vec::with_capacity(x_grid.len()); suite.len()];
    for (&(f, _), res) in cells.iter().zip(results) {
        let (cell, failed) = res?;
        scores[f].push(cell);
        failures[f].push(failed);
    }

    let grid = ScoreGrid {
        version: GRID_ARCHIVE_VERSION,
        statistic: statistic.clone(),
        functions: suite.iter().map(|e| e.template.function.id.to_string()).collect(),
        x_grid,
        levels: suite.iter().map(|e| e.levels.clone()).collect(),
        scores,
        failures,
        n: first.template.marginal.n,
        replicates,
        master_seed,
    };
    grid.validate()?;
    Ok(grid)
}
