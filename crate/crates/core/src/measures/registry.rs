use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::correlation::{distance_correlation, pearson_r, pearson_r2};
use super::ksg::{kraskov_mi_with, linfoot_normalize, KsgOptions, DEFAULT_K};
use super::Sample;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputUnit {
    UnitInterval,
    /// Signed correlation in [-1, 1].
    Signed,
    Nats,
}

/// Post-processing applied to a raw statistic value before analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalizer {
    /// 1 − e^(−2I), clamped at 0.
    Linfoot,
}

impl Normalizer {
    pub fn apply(self, value: f64) -> f64 {
        match self {
            Normalizer::Linfoot => linfoot_normalize(value),
        }
    }
}

/// Names a statistic and fixes its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticDescriptor {
    pub id: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<Normalizer>,
}

impl StatisticDescriptor {
    pub fn new(id: impl Into<String>) -> Self {
        StatisticDescriptor {
            id: id.into(),
            params: BTreeMap::new(),
            normalizer: None,
        }
    }

    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn with_normalizer(mut self, normalizer: Normalizer) -> Self {
        self.normalizer = Some(normalizer);
        self
    }

    pub fn pearson_r2() -> Self {
        Self::new("pearson_r2")
    }

    pub fn distance_correlation() -> Self {
        Self::new("distance_correlation")
    }

    pub fn kraskov_mi(k: usize) -> Self {
        Self::new("kraskov_mi").with_param("k", k as f64)
    }

    /// Canonical key, e.g. `kraskov_mi[k=6]+linfoot`. Distinct descriptors
    /// always map to distinct keys.
    pub fn key(&self) -> String {
        let mut key = self.id.clone();
        if !self.params.is_empty() {
            let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            key.push('[');
            key.push_str(&parts.join(","));
            key.push(']');
        }
        if let Some(Normalizer::Linfoot) = self.normalizer {
            key.push_str("+linfoot");
        }
        key
    }

    /// The key with characters unsafe in file names replaced.
    pub fn file_stem(&self) -> String {
        self.key()
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' {
                    c
                } else {
                    '_'
                }
            })
            .collect()
    }
}

impl fmt::Display for StatisticDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// A dependence statistic evaluated on bivariate samples.
///
/// Implement this to plug an external estimator (for example MIC_e) into the
/// harness via [`Registry::register`].
pub trait Statistic: Send + Sync {
    fn output_unit(&self) -> OutputUnit;

    /// Checks parameters before any sample is evaluated.
    fn validate(&self, _descriptor: &StatisticDescriptor) -> Result<()> {
        Ok(())
    }

    fn evaluate(&self, descriptor: &StatisticDescriptor, sample: &Sample) -> Result<f64>;
}

struct PearsonR2;
struct PearsonR;
struct DistanceCorrelation;
struct KraskovMi;

impl Statistic for PearsonR2 {
    fn output_unit(&self) -> OutputUnit {
        OutputUnit::UnitInterval
    }
    fn evaluate(&self, _: &StatisticDescriptor, sample: &Sample) -> Result<f64> {
        pearson_r2(sample)
    }
}

impl Statistic for PearsonR {
    fn output_unit(&self) -> OutputUnit {
        OutputUnit::Signed
    }
    fn evaluate(&self, _: &StatisticDescriptor, sample: &Sample) -> Result<f64> {
        pearson_r(sample)
    }
}

impl Statistic for DistanceCorrelation {
    fn output_unit(&self) -> OutputUnit {
        OutputUnit::UnitInterval
    }
    fn evaluate(&self, _: &StatisticDescriptor, sample: &Sample) -> Result<f64> {
        Ok(distance_correlation(sample))
    }
}

impl KraskovMi {
    fn options(descriptor: &StatisticDescriptor) -> Result<KsgOptions> {
        let bad = |name: &str, reason: &str| Error::InvalidParameter {
            id: descriptor.id.clone(),
            name: name.to_string(),
            reason: reason.to_string(),
        };
        let mut opts = KsgOptions::default();
        for (name, &value) in &descriptor.params {
            let whole = value.fract() == 0.0 && value.is_finite();
            match name.as_str() {
                "k" if whole && value >= 1.0 => opts.k = value as usize,
                "k" => return Err(bad("k", "must be a positive integer")),
                "jitter_seed" if whole && value >= 0.0 => opts.jitter_seed = Some(value as u64),
                "jitter_seed" => return Err(bad("jitter_seed", "must be a non-negative integer")),
                other => return Err(bad(other, "unknown parameter")),
            }
        }
        Ok(opts)
    }
}

impl Statistic for KraskovMi {
    fn output_unit(&self) -> OutputUnit {
        OutputUnit::Nats
    }
    fn validate(&self, descriptor: &StatisticDescriptor) -> Result<()> {
        Self::options(descriptor).map(|_| ())
    }
    fn evaluate(&self, descriptor: &StatisticDescriptor, sample: &Sample) -> Result<f64> {
        kraskov_mi_with(sample, Self::options(descriptor)?)
    }
}

/// Maps statistic ids to implementations.
#[derive(Clone)]
pub struct Registry {
    entries: BTreeMap<String, Arc<dyn Statistic>>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        r.register("pearson_r2", Arc::new(PearsonR2));
        r.register("pearson_r", Arc::new(PearsonR));
        r.register("distance_correlation", Arc::new(DistanceCorrelation));
        r.register("kraskov_mi", Arc::new(KraskovMi));
        r
    }
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.entries.keys()).finish()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            entries: BTreeMap::new(),
        }
    }

    /// Adds or replaces a statistic.
    pub fn register(&mut self, id: impl Into<String>, statistic: Arc<dyn Statistic>) {
        self.entries.insert(id.into(), statistic);
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn lookup(&self, id: &str) -> Result<&Arc<dyn Statistic>> {
        self.entries
            .get(id)
            .ok_or_else(|| Error::UnknownStatistic(id.to_string()))
    }

    pub fn validate(&self, descriptor: &StatisticDescriptor) -> Result<()> {
        self.lookup(&descriptor.id)?.validate(descriptor)
    }

    /// Unit of the values [`Registry::evaluate`] returns for this descriptor.
    pub fn output_unit(&self, descriptor: &StatisticDescriptor) -> Result<OutputUnit> {
        let raw = self.lookup(&descriptor.id)?.output_unit();
        Ok(if descriptor.normalizer.is_some() {
            OutputUnit::UnitInterval
        } else {
            raw
        })
    }

    pub fn evaluate(&self, descriptor: &StatisticDescriptor, sample: &Sample) -> Result<f64> {
        let raw = self.lookup(&descriptor.id)?.evaluate(descriptor, sample)?;
        Ok(match descriptor.normalizer {
            Some(n) => n.apply(raw),
            None => raw,
        })
    }
}

/// Evaluates a descriptor against the built-in statistics.
pub fn evaluate(descriptor: &StatisticDescriptor, sample: &Sample) -> Result<f64> {
    static DEFAULT: OnceLock<Registry> = OnceLock::new();
    DEFAULT.get_or_init(Registry::default).evaluate(descriptor, sample)
}

/// Default descriptor used when a config names a statistic without parameters.
pub fn default_descriptor(id: &str) -> StatisticDescriptor {
    match id {
        "kraskov_mi" => StatisticDescriptor::kraskov_mi(DEFAULT_K),
        other => StatisticDescriptor::new(other),
    }
}
