use std::collections::HashMap;

use super::model::PackageMeta;
use super::xml::{walk, Visit};
use super::{IngestError, ParseWarning, Parsed};

const PACKAGE: &[&str] = &["metadata", "package"];
const NAME: &[&str] = &["metadata", "package", "name"];
const DESCRIPTION: &[&str] = &["metadata", "package", "description"];
const PROVIDES_ENTRY: &[&str] = &["metadata", "package", "format", "provides", "entry"];
const REQUIRES_ENTRY: &[&str] = &["metadata", "package", "format", "requires", "entry"];

/// Imports the packages of a primary metadata document.
///
/// Namespace prefixes are ignored, so `rpm:entry` and `entry` both match.
/// When a name repeats (multilib repos do this) the last occurrence wins.
pub fn parse_primary(xml_bytes: &[u8]) -> Result<Parsed<PackageMeta>, IngestError> {
    let mut slots: Vec<Option<PackageMeta>> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let mut warnings = Vec::new();
    let mut current: Option<(Option<String>, PackageMeta)> = None;
    let mut missing_name = false;

    let walked = walk(xml_bytes, "metadata", |visit| {
        match visit {
            Visit::Open(el) => {
                if el.is(PACKAGE) {
                    current = Some((None, PackageMeta::new("", "")));
                }
            }
            Visit::Close(el) => {
                let Some((name, meta)) = current.as_mut() else {
                    return Ok(());
                };
                if el.is(NAME) {
                    *name = Some(el.text.trim().to_string());
                } else if el.is(DESCRIPTION) {
                    meta.description = el.text.trim().to_string();
                } else if el.is(PROVIDES_ENTRY) || el.is(REQUIRES_ENTRY) {
                    let target = if el.is(PROVIDES_ENTRY) {
                        &mut meta.provides
                    } else {
                        &mut meta.requires
                    };
                    if let Some(cap) = el.attr("name").map(str::trim).filter(|c| !c.is_empty()) {
                        if !target.iter().any(|c| c == cap) {
                            target.push(cap.to_string());
                        }
                    }
                } else if el.is(PACKAGE) {
                    let (name, mut meta) = current.take().expect("package builder present");
                    let Some(name) = name.filter(|n| !n.is_empty()) else {
                        missing_name = true;
                        return Err("package without name".to_string());
                    };
                    meta.name = name.clone();
                    if let Some(previous) = by_name.insert(name.clone(), slots.len()) {
                        slots[previous] = None;
                        warnings.push(ParseWarning::DuplicatePackage { name });
                    }
                    slots.push(Some(meta));
                }
            }
        }
        Ok(())
    });

    if missing_name {
        return Err(IngestError::MissingField {
            field: "name",
            context: format!("package #{}", slots.len() + 1),
        });
    }
    walked.map_err(IngestError::MalformedXml)?;
    Ok(Parsed {
        items: slots.into_iter().flatten().collect(),
        warnings,
    })
}
