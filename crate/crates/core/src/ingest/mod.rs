//! Repository metadata importers, the canonical snapshot format and the
//! mirror fetch client.

mod comps;
mod fetch;
mod model;
mod primary;
mod snapshot_io;
mod xml;

use std::fmt;

use thiserror::Error;

pub use comps::parse_comps;
pub use fetch::{fetch_repo_metadata, FetchError, FetchManifest, FetchedFile, MetadataKind};
pub use model::{GroupDef, PackageEntry, PackageMeta, Requirement, Snapshot};
pub use primary::parse_primary;
pub use snapshot_io::{load_snapshot, parse_snapshot, save_snapshot};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("missing field `{field}` in {context}")]
    MissingField {
        field: &'static str,
        context: String,
    },
    #[error("duplicate group id `{0}`")]
    DuplicateGroupId(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation: {0}")]
    SchemaViolation(String),
}

/// Non-fatal oddities found while importing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    UnknownRequirement {
        group: String,
        package: String,
        found: Option<String>,
    },
    DuplicateEntry {
        group: String,
        package: String,
    },
    EmptyEntry {
        group: String,
    },
    MissingGroupName {
        group: String,
    },
    DuplicatePackage {
        name: String,
    },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::UnknownRequirement {
                group,
                package,
                found: Some(found),
            } => write!(
                f,
                "group `{group}`: package `{package}` has type `{found}`, treated as optional"
            ),
            ParseWarning::UnknownRequirement {
                group,
                package,
                found: None,
            } => write!(
                f,
                "group `{group}`: package `{package}` has no type, treated as optional"
            ),
            ParseWarning::DuplicateEntry { group, package } => {
                write!(f, "group `{group}`: duplicate entry `{package}` ignored")
            }
            ParseWarning::EmptyEntry { group } => {
                write!(f, "group `{group}`: empty packagereq ignored")
            }
            ParseWarning::MissingGroupName { group } => {
                write!(f, "group `{group}` has no name, using its id")
            }
            ParseWarning::DuplicatePackage { name } => {
                write!(
                    f,
                    "package `{name}` listed more than once, keeping the last entry"
                )
            }
        }
    }
}

/// Items produced by an importer together with the warnings it raised.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub items: Vec<T>,
    pub warnings: Vec<ParseWarning>,
}

impl<T> Parsed<T> {
    pub fn warning_count(&self) -> usize {
        self.warnings.len()
    }
}

/// Assembles a snapshot from imported comps groups and primary packages.
pub fn assemble_snapshot(
    distribution: impl Into<String>,
    version: impl Into<String>,
    groups: Vec<GroupDef>,
    packages: Vec<PackageMeta>,
) -> Result<Snapshot, IngestError> {
    let snapshot = Snapshot {
        distribution: distribution.into(),
        version: version.into(),
        groups,
        packages,
    };
    snapshot.validate().map_err(IngestError::SchemaViolation)?;
    Ok(snapshot)
}
