//! Declarative experiment configuration.
//!
//! A config is a TOML file (or JSON, chosen by the `.json` extension):
//!
//! ```toml
//! preset = "fig2"
//! statistics = ["pearson_r2", "kraskov_mi[k=6]+linfoot", { id = "distance_correlation" }]
//! replicates = 100
//! ```
//!
//! Every field except `statistics` has a default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::MIN_REPLICATES;
use crate::measures::{default_descriptor, Normalizer, Registry, StatisticDescriptor};
use crate::relationships::{
    default_catalog, lookup, DesignKind, FunctionSpec, MarginalDesign, NoiseKind, NoiseModel, R2Mode,
    RelationshipModel, DEFAULT_TOL,
};
use crate::report::canonical_json;
use crate::{Error, Result};

/// Named marginal/noise combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Uniform random x, noise on y only.
    Fig2,
    /// Arc-length equispaced x, i.i.d. noise on both coordinates.
    Fig6,
}

impl Preset {
    pub fn design(self) -> DesignKind {
        match self {
            Preset::Fig2 => DesignKind::UniformRandom,
            Preset::Fig6 => DesignKind::ArcLengthEquispaced,
        }
    }

    pub fn noise(self) -> NoiseKind {
        match self {
            Preset::Fig2 => NoiseKind::YOnly,
            Preset::Fig6 => NoiseKind::XyIid,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig6 => "fig6",
        }
    }
}

/// A statistic as written in a config: either a key string such as
/// `kraskov_mi[k=6]+linfoot` or an explicit table.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum StatisticEntry {
    Key(String),
    Table(StatisticDescriptor),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    preset: Option<Preset>,
    #[serde(default)]
    design: Option<DesignKind>,
    #[serde(default)]
    noise: Option<NoiseKind>,
    statistics: Vec<StatisticEntry>,
    #[serde(default)]
    functions: Option<Vec<String>>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    replicates: Option<usize>,
    #[serde(default)]
    r2_levels: Option<usize>,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    beta: Option<f64>,
    #[serde(default)]
    y_grid_size: Option<usize>,
    #[serde(default)]
    r2_mode: Option<R2Mode>,
    #[serde(default)]
    master_seed: Option<u64>,
    #[serde(default)]
    calibration_tol: Option<f64>,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub design: DesignKind,
    pub noise: NoiseKind,
    pub statistics: Vec<StatisticDescriptor>,
    pub functions: Vec<String>,
    pub n: usize,
    pub replicates: usize,
    pub r2_levels: usize,
    /// Total level of the reliable/interpretable intervals (α/2 per tail).
    pub alpha: f64,
    /// Type II error bound for the detection threshold.
    pub beta: f64,
    pub y_grid_size: usize,
    pub r2_mode: R2Mode,
    pub master_seed: u64,
    pub calibration_tol: f64,
    /// Not part of any hash: moving the output never changes a number.
    #[serde(skip)]
    pub output_dir: PathBuf,
}

pub const DEFAULT_N: usize = 500;
pub const DEFAULT_REPLICATES: usize = 500;
pub const DEFAULT_R2_LEVELS: usize = 41;
pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_BETA: f64 = 0.05;
pub const DEFAULT_Y_GRID_SIZE: usize = 201;

impl ExperimentConfig {
    /// A config with every default applied.
    pub fn new(preset: Preset, statistics: Vec<StatisticDescriptor>) -> Self {
        ExperimentConfig {
            preset,
            design: preset.design(),
            noise: preset.noise(),
            statistics,
            functions: default_catalog().iter().map(|f| f.id.to_string()).collect(),
            n: DEFAULT_N,
            replicates: DEFAULT_REPLICATES,
            r2_levels: DEFAULT_R2_LEVELS,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            y_grid_size: DEFAULT_Y_GRID_SIZE,
            r2_mode: R2Mode::DenoisedDesign,
            master_seed: 0,
            calibration_tol: DEFAULT_TOL,
            output_dir: PathBuf::from("out"),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| parse_error("<toml>", text, e))?;
        Self::from_raw(raw)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::ConfigParse {
            path: PathBuf::from("<json>"),
            message: format!("line {}, column {}: {e}", e.line(), e.column()),
        })?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let preset = raw.preset.unwrap_or(Preset::Fig2);
        let statistics = raw
            .statistics
            .into_iter()
            .map(StatisticEntry::into_descriptor)
            .collect::<Result<_>>()?;
        let mut cfg = ExperimentConfig::new(preset, statistics);
        cfg.design = raw.design.unwrap_or(cfg.design);
        cfg.noise = raw.noise.unwrap_or(cfg.noise);
        if let Some(functions) = raw.functions {
            cfg.functions = functions;
        }
        cfg.n = raw.n.unwrap_or(cfg.n);
        cfg.replicates = raw.replicates.unwrap_or(cfg.replicates);
        cfg.r2_levels = raw.r2_levels.unwrap_or(cfg.r2_levels);
        cfg.alpha = raw.alpha.unwrap_or(cfg.alpha);
        cfg.beta = raw.beta.unwrap_or(cfg.beta);
        cfg.y_grid_size = raw.y_grid_size.unwrap_or(cfg.y_grid_size);
        cfg.r2_mode = raw.r2_mode.unwrap_or(cfg.r2_mode);
        cfg.master_seed = raw.master_seed.unwrap_or(cfg.master_seed);
        cfg.calibration_tol = raw.calibration_tol.unwrap_or(cfg.calibration_tol);
        if let Some(dir) = raw.output_dir {
            cfg.output_dir = dir;
        }
        cfg.validate(&Registry::default())?;
        Ok(cfg)
    }

    /// Checks ids and numeric bounds.
    pub fn validate(&self, registry: &Registry) -> Result<()> {
        if self.statistics.is_empty() {
            return Err(Error::config("statistics", "at least one statistic is required"));
        }
        for s in &self.statistics {
            registry.validate(s)?;
        }
        if self.functions.is_empty() {
            return Err(Error::config("functions", "at least one function is required"));
        }
        for (i, id) in self.functions.iter().enumerate() {
            lookup(id)?;
            if self.functions[..i].contains(id) {
                return Err(Error::config("functions", format!("`{id}` is listed twice")));
            }
        }
        if self.n < 2 {
            return Err(Error::config("n", format!("must be at least 2, got {}", self.n)));
        }
        if self.replicates < MIN_REPLICATES {
            return Err(Error::config(
                "replicates",
                format!("must be at least {MIN_REPLICATES}, got {}", self.replicates),
            ));
        }
        if self.r2_levels < 2 {
            return Err(Error::config(
                "r2_levels",
                format!("must be at least 2, got {}", self.r2_levels),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::config(
                "alpha",
                format!("must lie in (0, 0.5), got {}", self.alpha),
            ));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::config("beta", format!("must lie in (0, 1), got {}", self.beta)));
        }
        if self.y_grid_size < 2 {
            return Err(Error::config(
                "y_grid_size",
                format!("must be at least 2, got {}", self.y_grid_size),
            ));
        }
        if !(self.calibration_tol > 0.0 && self.calibration_tol < 0.5) {
            return Err(Error::config(
                "calibration_tol",
                format!("must lie in (0, 0.5), got {}", self.calibration_tol),
            ));
        }
        Ok(())
    }

    /// Relationship templates for the configured functions (σ unset).
    pub fn templates(&self) -> Result<Vec<RelationshipModel>> {
        self.functions
            .iter()
            .map(|id| {
                let function: FunctionSpec = lookup(id)?;
                Ok(RelationshipModel::new(
                    function,
                    MarginalDesign {
                        kind: self.design,
                        n: self.n,
                    },
                    NoiseModel {
                        kind: self.noise,
                        sigma: 0.0,
                    },
                ))
            })
            .collect()
    }

    /// Hash of every field that affects any output number.
    pub fn hash(&self) -> String {
        digest(&serde_json::to_value(self).expect("config serializes"))
    }

    /// Hash of the fields the calibrated noise levels depend on.
    pub fn calibration_hash(&self) -> String {
        digest(&serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "design": self.design,
            "noise": self.noise,
            "functions": self.functions,
            "n": self.n,
            "r2_levels": self.r2_levels,
            "r2_mode": self.r2_mode,
            "master_seed": self.master_seed,
            "calibration_tol": self.calibration_tol,
        }))
    }

    /// Hash of the fields one statistic's score grid depends on.
    pub fn grid_hash(&self, statistic: &StatisticDescriptor) -> String {
        digest(&serde_json::json!({
            "calibration": self.calibration_hash(),
            "statistic": statistic.key(),
            "replicates": self.replicates,
        }))
    }
}

fn digest(value: &serde_json::Value) -> String {
    let text = canonical_json(value).expect("json values serialize");
    let bytes = Sha256::digest(text.as_bytes());
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl StatisticEntry {
    fn into_descriptor(self) -> Result<StatisticDescriptor> {
        match self {
            StatisticEntry::Key(key) => parse_descriptor(&key),
            StatisticEntry::Table(d) => Ok(d),
        }
    }
}

/// Parses a descriptor key: `id`, `id[name=value,...]`, optionally followed
/// by `+linfoot`. A bare id gets the statistic's default parameters.
pub fn parse_descriptor(key: &str) -> Result<StatisticDescriptor> {
    let bad = |reason: &str| Error::config("statistics", format!("cannot parse `{key}`: {reason}"));
    let (body, normalizer) = match key.trim().split_once('+') {
        Some((body, "linfoot")) => (body, Some(Normalizer::Linfoot)),
        Some((_, other)) => return Err(bad(&format!("unknown normalizer `{other}`"))),
        None => (key.trim(), None),
    };
    let mut descriptor = match body.split_once('[') {
        None => {
            if body.is_empty() {
                return Err(bad("empty id"));
            }
            default_descriptor(body)
        }
        Some((id, rest)) => {
            let inner = rest.strip_suffix(']').ok_or_else(|| bad("missing `]`"))?;
            let mut params = BTreeMap::new();
            for pair in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (name, value) = pair.split_once('=').ok_or_else(|| bad("expected name=value"))?;
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| bad(&format!("`{}` is not a number", value.trim())))?;
                params.insert(name.trim().to_string(), value);
            }
            StatisticDescriptor {
                id: id.trim().to_string(),
                params,
                normalizer: None,
            }
        }
    };
    descriptor.normalizer = normalizer;
    Ok(descriptor)
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let result = if is_json {
        ExperimentConfig::from_json_str(&text)
    } else {
        ExperimentConfig::from_toml_str(&text)
    };
    result.map_err(|e| match e {
        Error::ConfigParse { message, .. } => Error::ConfigParse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

fn parse_error(path: &str, text: &str, e: toml::de::Error) -> Error {
    let message = match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}: {}", e.message())
        }
        None => e.message().to_string(),
    };
    Error::ConfigParse {
        path: PathBuf::from(path),
        message,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_toml_str("preset = \"fig2\"\nstatistics = [\"pearson_r2\"]\n").unwrap();
        assert_eq!(
            cfg,
            ExperimentConfig::new(Preset::Fig2, vec![StatisticDescriptor::pearson_r2()])
        );
        assert_eq!(cfg.functions.len(), 16);
        assert_eq!((cfg.n, cfg.replicates, cfg.r2_levels), (500, 500, 41));
        assert_eq!((cfg.alpha, cfg.beta, cfg.master_seed), (0.1, 0.05, 0));
        assert_eq!(cfg.design, DesignKind::UniformRandom);
        assert_eq!(cfg.noise, NoiseKind::YOnly);
    }

    #[test]
    fn fig6_preset() {
        let cfg = ExperimentConfig::from_toml_str("preset = \"fig6\"\nstatistics = [\"kraskov_mi\"]\n").unwrap();
        assert_eq!(cfg.design, DesignKind::ArcLengthEquispaced);
        assert_eq!(cfg.noise, NoiseKind::XyIid);
        assert_eq!(cfg.statistics, vec![StatisticDescriptor::kraskov_mi(6)]);
    }

    #[test]
    fn alpha_out_of_range() {
        let err = ExperimentConfig::from_toml_str("statistics = [\"pearson_r2\"]\nalpha = 0.7\n").unwrap_err();
        assert!(
            matches!(err, Error::Config { ref field, .. } if field == "alpha"),
            "{err}"
        );
    }

    #[test]
    fn unknown_function_named() {
        let err =
            ExperimentConfig::from_toml_str("statistics = [\"pearson_r2\"]\nfunctions = [\"linear\", \"wiggle\"]\n")
                .unwrap_err();
        assert!(err.to_string().contains("wiggle"), "{err}");
    }

    #[test]
    fn unknown_statistic_named() {
        let err = ExperimentConfig::from_toml_str("statistics = [\"mic_e\"]\n").unwrap_err();
        assert!(err.to_string().contains("mic_e"), "{err}");
    }

    #[test]
    fn parse_error_has_line() {
        let err = ExperimentConfig::from_toml_str("statistics = [\"pearson_r2\"]\nn = = 3\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { .. }));
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(ExperimentConfig::from_toml_str("statistics = [\"pearson_r2\"]\nreplicate = 3\n").is_err());
    }

    #[test]
    fn descriptor_keys_parse() {
        let d = parse_descriptor("kraskov_mi[k=4]+linfoot").unwrap();
        assert_eq!(
            d,
            StatisticDescriptor::kraskov_mi(4).with_normalizer(Normalizer::Linfoot)
        );
        assert_eq!(parse_descriptor(&d.key()).unwrap(), d);
        assert_eq!(
            parse_descriptor("kraskov_mi").unwrap(),
            StatisticDescriptor::kraskov_mi(6)
        );
        assert!(parse_descriptor("kraskov_mi[k=4").is_err());
        assert!(parse_descriptor("pearson_r2+log").is_err());
    }

    #[test]
    fn table_statistics() {
        let cfg = ExperimentConfig::from_toml_str(
            "statistics = [{ id = \"kraskov_mi\", params = { k = 3 }, normalizer = \"linfoot\" }]\n",
        )
        .unwrap();
        assert_eq!(cfg.statistics[0].key(), "kraskov_mi[k=3]+linfoot");
    }

    #[test]
    fn json_matches_toml() {
        let t = ExperimentConfig::from_toml_str("statistics = [\"pearson_r2\"]\nn = 100\n").unwrap();
        let j = ExperimentConfig::from_json_str(r#"{"statistics": ["pearson_r2"], "n": 100}"#).unwrap();
        assert_eq!(t, j);
        assert_eq!(t.hash(), j.hash());
    }

    #[test]
    fn hash_tracks_number_fields_only() {
        let base = ExperimentConfig::new(Preset::Fig2, vec![StatisticDescriptor::pearson_r2()]);
        let mut moved = base.clone();
        moved.output_dir = PathBuf::from("elsewhere");
        assert_eq!(base.hash(), moved.hash());
        let mut changes: Vec<ExperimentConfig> = Vec::new();
        let mut c = base.clone();
        c.n = 400;
        changes.push(c);
        let mut c = base.clone();
        c.replicates = 100;
        changes.push(c);
        let mut c = base.clone();
        c.alpha = 0.05;
        changes.push(c);
        let mut c = base.clone();
        c.master_seed = 1;
        changes.push(c);
        let mut c = base.clone();
        c.statistics = vec![StatisticDescriptor::kraskov_mi(4)];
        changes.push(c);
        let mut c = base.clone();
        c.functions.pop();
        changes.push(c);
        for c in &changes {
            assert_ne!(c.hash(), base.hash());
        }
    }

    #[test]
    fn grid_hash_depends_on_statistic() {
        let cfg = ExperimentConfig::new(Preset::Fig2, vec![]);
        let a = cfg.grid_hash(&StatisticDescriptor::kraskov_mi(4));
        let b = cfg.grid_hash(&StatisticDescriptor::kraskov_mi(6));
        assert_ne!(a, b);
        let mut other = cfg.clone();
        other.alpha = 0.2;
        assert_eq!(
            cfg.grid_hash(&StatisticDescriptor::kraskov_mi(4)),
            other.grid_hash(&StatisticDescriptor::kraskov_mi(4))
        );
    }
}
