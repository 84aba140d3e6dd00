//! Group quality scoring: compactness, relevance, differentiation and
//! distribution, fused into a single GValue per group.

mod metrics;
mod report;

use thiserror::Error;

pub use metrics::{
    compactness, desc_differentiation, differentiation, distribution_value, name_differentiation,
    package_weight, pkglist_differentiation, relevance, weighted_jaccard, Compactness,
    Differentiation, DistributionStats,
};
pub use report::{
    default_index, score_group, score_snapshot, score_snapshot_with, write_reports_csv,
    GValueReport, ReportFlag, SnapshotScores, DEFAULT_LOW_QUALITY_THRESHOLD,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GValueError {
    #[error("group `{0}` is not part of the snapshot")]
    UnknownGroup(String),
    #[error("group `{0}` has no packages")]
    EmptyGroup(String),
    #[error("differentiation needs at least two groups")]
    SingletonCorpus,
}
