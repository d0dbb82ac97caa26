use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::model::{R2Curve, R2Mode, RelationshipModel};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 0.002;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_MC_POINTS: usize = 200_000;

/// A noise level tuned so the relationship's R² hits a grid value.
///
/// The independence level (target 0) carries `sigma = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibratedLevel {
    pub target_r2: f64,
    #[serde(serialize_with = "ser_sigma", deserialize_with = "de_sigma")]
    pub sigma: f64,
    pub achieved_r2: f64,
    pub tolerance: f64,
}

impl CalibratedLevel {
    pub fn independence(tolerance: f64) -> Self {
        CalibratedLevel {
            target_r2: 0.0,
            sigma: f64::INFINITY,
            achieved_r2: 0.0,
            tolerance,
        }
    }
}

fn ser_sigma<S: Serializer>(sigma: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if sigma.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*sigma)
    }
}

fn de_sigma<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid sigma `{t}`"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub mode: R2Mode,
    pub tol: f64,
    pub max_iter: usize,
    pub mc_points: usize,
    pub seed: u64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            mode: R2Mode::DenoisedDesign,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            mc_points: DEFAULT_MC_POINTS,
            seed: 0,
        }
    }
}

/// Finds σ with |R²(σ) − target| ≤ tol by bisection.
///
/// The template's own σ is ignored. Target 1 returns σ = 0 exactly.
pub fn calibrate_sigma(
    template: &RelationshipModel,
    target_r2: f64,
    opts: &CalibrationOptions,
) -> Result<CalibratedLevel> {
    let curve = R2Curve::new(template, opts.mode, opts.mc_points, opts.seed)?;
    calibrate_on_curve(&curve, target_r2, opts)
}

fn calibrate_on_curve(curve: &R2Curve, target: f64, opts: &CalibrationOptions) -> Result<CalibratedLevel> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::config("target_r2", format!("must lie in (0, 1], got {target}")));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::config("tol", format!("must be positive, got {}", opts.tol)));
    }
    let level = |sigma: f64, achieved: f64| CalibratedLevel {
        target_r2: target,
        sigma,
        achieved_r2: achieved,
        tolerance: opts.tol,
    };
    if target == 1.0 {
        return Ok(level(0.0, 1.0));
    }
    let at_zero = curve.r2(0.0);
    if at_zero < target - opts.tol {
        return Err(Error::BracketNotFound { target, at_zero });
    }

    let mut lo = 0.0;
    let mut hi = curve.signal_variance().sqrt();
    let mut grow = 0;
    while curve.r2(hi) >= target {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::BracketNotFound { target, at_zero });
        }
    }

    let mut achieved = f64::NAN;
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (lo + hi);
        achieved = curve.r2(mid);
        if (achieved - target).abs() <= opts.tol {
            return Ok(level(mid, achieved));
        }
        if achieved > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        target,
        achieved,
        iterations: opts.max_iter,
    })
}

/// Uniform R² grid with `levels` points from 0 to 1 inclusive.
pub fn r2_grid(levels: usize) -> Vec<f64> {
    assert!(levels >= 2, "need at least two R² levels");
    (0..levels).map(|i| i as f64 / (levels - 1) as f64).collect()
}

/// Calibrates every level of the R² grid for one relationship type.
///
/// Level 0 is the independence level rather than a calibrated σ.
pub fn calibrate_levels(
    template: &RelationshipModel,
    levels: usize,
    opts: &CalibrationOptions,
) -> Result<Vec<CalibratedLevel>> {
    let curve = R2Curve::new(template, opts.mode, opts.mc_points, opts.seed)?;
    r2_grid(levels)
        .into_iter()
        .map(|t| {
            if t == 0.0 {
                Ok(CalibratedLevel::independence(opts.tol))
            } else {
                calibrate_on_curve(&curve, t, opts)
            }
        })
        .collect()
}
