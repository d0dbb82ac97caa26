//! Power of right-tailed tests of H₀: R² = x₀ against H₁: R² = x₁.
//!
//! Both hypotheses are composite over the relationship types in the suite.
//! The most permissive level-α test rejects when the score exceeds the
//! largest (1 − α) quantile among the null cells; its power at x₁ is the
//! smallest rejection rate among the alternative cells.

use serde::{Deserialize, Serialize};

use super::intervals::{interpretable_interval, reliable_curve, Interval};
use super::quantile::{fraction_above, quantile};
use super::ScoreGrid;
use crate::Result;

/// Critical value of the most permissive level-α right-tailed test of R² = x₀.
pub fn critical_value(grid: &ScoreGrid, x0_level: usize, alpha: f64) -> Result<f64> {
    let mut t = f64::NEG_INFINITY;
    for cell in grid.cells_at(x0_level) {
        t = t.max(quantile(cell, 1.0 - alpha)?);
    }
    Ok(t)
}

/// Worst-case rejection rate of the test with critical value `t` at one level.
pub fn min_rejection(grid: &ScoreGrid, level: usize, t: f64) -> f64 {
    grid.cells_at(level)
        .map(|cell| fraction_above(cell, t))
        .fold(f64::INFINITY, f64::min)
}

/// Power at every grid x₁ ≥ x₀, as `(x₁, power)` pairs.
pub fn power_function(grid: &ScoreGrid, x0_level: usize, alpha: f64) -> Result<Vec<(f64, f64)>> {
    let t = critical_value(grid, x0_level, alpha)?;
    Ok((x0_level..grid.num_levels())
        .map(|l| (grid.x_grid[l], min_rejection(grid, l, t)))
        .collect())
}

/// Smallest closed interval holding every x₁ ≥ x₀ with power < 1 − α;
/// `[x₀, x₀]` when there is none.
pub fn uncertain_set(power_row: &[(f64, f64)], x0: f64, alpha: f64) -> Interval {
    let mut low = power_row
        .iter()
        .filter(|&&(x1, p)| x1 >= x0 && p < 1.0 - alpha)
        .map(|&(x1, _)| x1);
    match low.next() {
        None => Interval::point(x0),
        Some(first) => {
            let (lo, hi) = low.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)));
            Interval::new(lo.min(x0), hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub x0: f64,
    pub critical_value: f64,
    /// `(x₁, power)` for every grid x₁ ≥ x₀.
    pub power: Vec<(f64, f64)>,
    pub uncertain: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSurface {
    pub alpha: f64,
    pub x_grid: Vec<f64>,
    pub rows: Vec<PowerRow>,
}

impl PowerSurface {
    /// Mean power over all pairs with x₁ > x₀; `None` for a single-level grid.
    pub fn average_power(&self) -> Option<f64> {
        let (sum, count) = self
            .rows
            .iter()
            .flat_map(|r| r.power.iter().filter(move |(x1, _)| *x1 > r.x0))
            .fold((0.0, 0usize), |(s, c), (_, p)| (s + p, c + 1));
        (count > 0).then(|| sum / count as f64)
    }
}

/// Power function and uncertain set at every null level of the grid.
pub fn power_surface(grid: &ScoreGrid, alpha: f64) -> Result<PowerSurface> {
    let rows = (0..grid.num_levels())
        .map(|l| {
            let x0 = grid.x_grid[l];
            let power = power_function(grid, l, alpha)?;
            Ok(PowerRow {
                x0,
                critical_value: critical_value(grid, l, alpha)?,
                uncertain: uncertain_set(&power, x0, alpha),
                power,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerSurface {
        alpha,
        x_grid: grid.x_grid.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCheck {
    pub x0: f64,
    pub interpretable: Interval,
    pub uncertain: Interval,
    /// Largest endpoint gap, in grid steps.
    pub discrepancy: f64,
}

/// Outcome of comparing interpretable intervals with uncertain sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub alpha: f64,
    /// Max over checked rows; 0 when no row could be checked.
    pub max_discrepancy: f64,
    pub checked: Vec<RowCheck>,
    /// Levels whose reliable upper endpoint breaks strict monotonicity.
    pub monotonicity_violations: Vec<f64>,
}

/// For every x₀, compares Int_α(y) at y = max Rel_α(x₀) against the closure
/// of the uncertain set of the level-α/2 power function at x₀. The two must
/// agree whenever max Rel_α(·) is strictly increasing.
///
/// A row x₀ is checked only if every lower level has a strictly smaller
/// reliable upper endpoint and every higher level a strictly larger one;
/// other rows are listed in `monotonicity_violations`.
pub fn theorem1_consistency(grid: &ScoreGrid, alpha: f64) -> Result<ConsistencyReport> {
    let curve = reliable_curve(grid, alpha)?;
    let step = grid.step();
    let mut checked = Vec::new();
    let mut violations = Vec::new();
    for (i, &(x0, rel)) in curve.iter().enumerate() {
        let y = rel.hi;
        let monotone = curve[..i].iter().all(|(_, r)| r.hi < y) && curve[i + 1..].iter().all(|(_, r)| r.hi > y);
        if !monotone {
            violations.push(x0);
            continue;
        }
        let interp = interpretable_interval(&curve, y).interval;
        let row = power_function(grid, i, alpha / 2.0)?;
        let unc = uncertain_set(&row, x0, alpha / 2.0);
        let discrepancy = ((interp.lo - unc.lo).abs().max((interp.hi - unc.hi).abs())) / step;
        checked.push(RowCheck {
            x0,
            interpretable: interp,
            uncertain: unc,
            discrepancy,
        });
    }
    let max_discrepancy = checked.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
    Ok(ConsistencyReport {
        alpha,
        max_discrepancy,
        checked,
        monotonicity_violations: violations,
    })
}
