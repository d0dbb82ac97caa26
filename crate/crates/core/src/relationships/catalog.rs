use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::{Error, Result};

/// A function f : [0,1] → ℝ defining one relationship type.
#[derive(Clone, Copy)]
pub struct FunctionSpec {
    pub id: &'static str,
    pub formula: &'static str,
    func: fn(f64) -> f64,
    pub display_range: (f64, f64),
}

impl FunctionSpec {
    pub fn new(id: &'static str, formula: &'static str, func: fn(f64) -> f64) -> Self {
        let mut spec = FunctionSpec {
            id,
            formula,
            func,
            display_range: (0.0, 0.0),
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=RANGE_POINTS {
            let y = spec.eval(i as f64 / RANGE_POINTS as f64);
            lo = lo.min(y);
            hi = hi.max(y);
        }
        spec.display_range = (lo, hi);
        spec
    }

    /// Evaluates f, clamping the argument into [0,1] first.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.func)(x.clamp(0.0, 1.0))
    }
}

const RANGE_POINTS: usize = 10_000;

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("id", &self.id)
            .field("formula", &self.formula)
            .finish()
    }
}

impl PartialEq for FunctionSpec {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

/// JSON export form of a catalog entry.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub formula: &'static str,
    pub display_range: [f64; 2],
}

impl From<&FunctionSpec> for CatalogEntry {
    fn from(f: &FunctionSpec) -> Self {
        CatalogEntry {
            id: f.id,
            formula: f.formula,
            display_range: [f.display_range.0, f.display_range.1],
        }
    }
}

/// The 16 default relationship types, spanning monotone, non-monotone,
/// oscillatory and abrupt shapes.
pub fn default_catalog() -> Vec<FunctionSpec> {
    vec![
        FunctionSpec::new("linear", "x", |x| x),
        FunctionSpec::new("parabolic", "4(x-1/2)^2", |x| 4.0 * (x - 0.5).powi(2)),
        FunctionSpec::new("cubic", "(2x-1)^3", |x| (2.0 * x - 1.0).powi(3)),
        FunctionSpec::new("fourth_root", "x^(1/4)", |x| x.powf(0.25)),
        FunctionSpec::new("sigmoid", "1/(1+exp(-20(x-1/2)))", |x| {
            1.0 / (1.0 + (-20.0 * (x - 0.5)).exp())
        }),
        FunctionSpec::new("step", "1[x>1/2]", |x| if x > 0.5 { 1.0 } else { 0.0 }),
        FunctionSpec::new("spike", "10x for x<=0.1, (10/9)(1-x) otherwise", |x| {
            if x <= 0.1 {
                10.0 * x
            } else {
                10.0 / 9.0 * (1.0 - x)
            }
        }),
        FunctionSpec::new("sine_low", "sin(4 pi x)", |x| (4.0 * PI * x).sin()),
        FunctionSpec::new("sine_high", "sin(16 pi x)", |x| (16.0 * PI * x).sin()),
        FunctionSpec::new("sine_varying", "sin(5 pi x (1+x))", |x| {
            (5.0 * PI * x * (1.0 + x)).sin()
        }),
        FunctionSpec::new("cosine_high", "cos(14 pi x)", |x| (14.0 * PI * x).cos()),
        FunctionSpec::new("linear_periodic_low", "x + sin(4 pi x)/4", |x| {
            x + (4.0 * PI * x).sin() / 4.0
        }),
        FunctionSpec::new("linear_periodic_high", "x + sin(16 pi x)/8", |x| {
            x + (16.0 * PI * x).sin() / 8.0
        }),
        FunctionSpec::new("exponential", "2^(10x)/2^10", |x| (10.0 * x - 10.0).exp2()),
        FunctionSpec::new("damped_sine", "exp(-2x) sin(8 pi x)", |x| {
            (-2.0 * x).exp() * (8.0 * PI * x).sin()
        }),
        FunctionSpec::new("lopsided_l", "min(1, 50x)(1-x)", |x| (50.0 * x).min(1.0) * (1.0 - x)),
    ]
}

pub fn lookup(id: &str) -> Result<FunctionSpec> {
    default_catalog()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}
