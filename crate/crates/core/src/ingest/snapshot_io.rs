use std::fs;
use std::path::Path;

use super::model::Snapshot;
use super::IngestError;

/// Reads and validates a canonical snapshot file.
pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Snapshot, IngestError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_snapshot(&bytes)
}

pub fn parse_snapshot(bytes: &[u8]) -> Result<Snapshot, IngestError> {
    let snapshot: Snapshot =
        serde_json::from_slice(bytes).map_err(|e| IngestError::SchemaViolation(e.to_string()))?;
    snapshot.validate().map_err(IngestError::SchemaViolation)?;
    Ok(snapshot)
}

/// Canonical encoding: two-space indented JSON with keys in declaration
/// order and a trailing newline.
pub fn save_snapshot(snapshot: &Snapshot) -> Result<Vec<u8>, IngestError> {
    snapshot.validate().map_err(IngestError::SchemaViolation)?;
    let mut bytes = serde_json::to_vec_pretty(snapshot)
        .map_err(|e| IngestError::SchemaViolation(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}
