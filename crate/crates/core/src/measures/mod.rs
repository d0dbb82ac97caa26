//! Dependence statistics and the registry that dispatches to them.

mod correlation;
mod ksg;
mod registry;
mod sample;
mod special;

pub use correlation::{distance_correlation, pearson_r, pearson_r2};
pub use ksg::{kraskov_mi, kraskov_mi_with, linfoot_normalize, KsgOptions, DEFAULT_K};
pub use registry::{default_descriptor, evaluate, Normalizer, OutputUnit, Registry, Statistic, StatisticDescriptor};
pub use sample::Sample;
pub use special::digamma;
