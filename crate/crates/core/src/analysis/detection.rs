use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::power::{critical_value, min_rejection};
use super::ScoreGrid;
use crate::{Error, Result};

/// Detection threshold on the R² grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    At(f64),
    /// No suffix of the grid reaches the required power.
    NoneAchieved,
}

impl Threshold {
    /// Threshold as a number, with `NoneAchieved` above every grid value.
    pub fn upper_bound(&self) -> f64 {
        match self {
            Threshold::At(d) => *d,
            Threshold::NoneAchieved => f64::INFINITY,
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::At(d) => s.serialize_f64(*d),
            Threshold::NoneAchieved => s.serialize_str("none-achieved"),
        }
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Threshold::At(v)),
            Repr::Text(t) if t == "none-achieved" => Ok(Threshold::NoneAchieved),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid threshold `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub alpha: f64,
    pub beta: f64,
    /// Critical value of the level-α independence test.
    pub critical_value: f64,
    /// Worst-case power at each grid x.
    pub min_power: Vec<(f64, f64)>,
    pub threshold: Threshold,
}

/// Smallest grid d such that the level-α independence test has power at
/// least 1 − β on every relationship in the suite with R² > d.
///
/// The qualifying region is the longest suffix of the grid where the
/// worst-case power reaches 1 − β; d is the grid point just before it.
pub fn detection_threshold(grid: &ScoreGrid, alpha: f64, beta: f64) -> Result<DetectionReport> {
    let null = grid
        .x_grid
        .iter()
        .position(|&x| x == 0.0)
        .ok_or(Error::MissingIndependenceLevel)?;
    let t = critical_value(grid, null, alpha)?;
    let min_power: Vec<(f64, f64)> = (0..grid.num_levels())
        .map(|l| (grid.x_grid[l], min_rejection(grid, l, t)))
        .collect();
    let suffix_start = min_power
        .iter()
        .rposition(|&(_, p)| p < 1.0 - beta)
        .map_or(0, |last_fail| last_fail + 1);
    let threshold = if suffix_start >= min_power.len() {
        Threshold::NoneAchieved
    } else if suffix_start == 0 {
        Threshold::At(min_power[0].0)
    } else {
        Threshold::At(min_power[suffix_start - 1].0)
    };
    Ok(DetectionReport {
        alpha,
        beta,
        critical_value: t,
        min_power,
        threshold,
    })
}
