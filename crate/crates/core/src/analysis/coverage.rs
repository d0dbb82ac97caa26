use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::intervals::{interpretable_interval, reliable_curve};
use super::{ScoreGrid, SuiteEntry};
use crate::measures::Registry;
use crate::relationships::generate_sample;
use crate::seed::mix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub alpha: f64,
    pub trials: usize,
    pub covered: usize,
    pub extrapolated: usize,
    pub fraction: f64,
}

/// Empirical coverage of interpretable intervals on fresh samples.
///
/// Each trial picks a (function, level) uniformly at random, draws a new
/// sample, scores it and checks whether the level's target R² falls inside
/// the interpretable interval at that score. Seeds come from `seed` and are
/// independent of those used to build `grid`.
pub fn empirical_coverage(
    grid: &ScoreGrid,
    suite: &[SuiteEntry],
    registry: &Registry,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<CoverageReport> {
    if suite.len() != grid.functions.len() {
        return Err(Error::InvalidGrid(format!(
            "suite has {} functions, grid has {}",
            suite.len(),
            grid.functions.len()
        )));
    }
    let curve = reliable_curve(grid, alpha)?;
    let mut covered = 0;
    let mut extrapolated = 0;
    for t in 0..trials {
        let mut pick = ChaCha8Rng::seed_from_u64(mix(&[seed, t as u64, 0]));
        let f = pick.random_range(0..suite.len());
        let l = pick.random_range(0..grid.num_levels());
        let entry = &suite[f];
        let model = entry.template.with_sigma(entry.levels[l].sigma);
        let (sample, _) = generate_sample(&model, mix(&[seed, t as u64, 1]));
        let y = registry.evaluate(&grid.statistic, &sample)?;
        let it = interpretable_interval(&curve, y);
        extrapolated += it.extrapolated as usize;
        covered += it.interval.contains(grid.x_grid[l]) as usize;
    }
    Ok(CoverageReport {
        alpha,
        trials,
        covered,
        extrapolated,
        fraction: covered as f64 / trials.max(1) as f64,
    })
}
