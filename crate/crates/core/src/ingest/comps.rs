use std::collections::HashSet;

use super::model::{GroupDef, PackageEntry, Requirement};
use super::xml::{walk, Visit};
use super::{IngestError, ParseWarning, Parsed};

const GROUP: &[&str] = &["comps", "group"];
const GROUP_ID: &[&str] = &["comps", "group", "id"];
const GROUP_NAME: &[&str] = &["comps", "group", "name"];
const GROUP_DESCRIPTION: &[&str] = &["comps", "group", "description"];
const PACKAGEREQ: &[&str] = &["comps", "group", "packagelist", "packagereq"];

#[derive(Default)]
struct GroupBuilder {
    id: Option<String>,
    name: Option<String>,
    description: Option<String>,
    packages: Vec<PackageEntry>,
    pending: Vec<PendingWarning>,
}

enum PendingWarning {
    Unknown {
        package: String,
        found: Option<String>,
    },
    Duplicate(String),
    Empty,
}

/// Imports every `<group>` of a comps document, in document order.
///
/// `<category>` and `<environment>` blocks are skipped. Translated names and
/// descriptions (`xml:lang`) are ignored. Package types other than
/// mandatory/default/optional become optional and raise a warning.
pub fn parse_comps(xml_bytes: &[u8]) -> Result<Parsed<GroupDef>, IngestError> {
    let mut groups: Vec<GroupDef> = Vec::new();
    let mut warnings = Vec::new();
    let mut ids = HashSet::new();
    let mut current: Option<GroupBuilder> = None;
    let mut failure: Option<IngestError> = None;

    let walked = walk(xml_bytes, "comps", |visit| {
        match visit {
            Visit::Open(el) => {
                if el.is(GROUP) {
                    current = Some(GroupBuilder::default());
                }
            }
            Visit::Close(el) => {
                let Some(builder) = current.as_mut() else {
                    return Ok(());
                };
                let translated = el.attr("xml:lang").is_some();
                if el.is(GROUP_ID) {
                    builder.id = Some(el.text.trim().to_string());
                } else if el.is(GROUP_NAME) && !translated {
                    builder.name = Some(el.text.trim().to_string());
                } else if el.is(GROUP_DESCRIPTION) && !translated {
                    builder.description = Some(el.text.trim().to_string());
                } else if el.is(PACKAGEREQ) {
                    let name = el.text.trim();
                    if name.is_empty() {
                        builder.pending.push(PendingWarning::Empty);
                    } else if builder.packages.iter().any(|p| p.name == name) {
                        builder
                            .pending
                            .push(PendingWarning::Duplicate(name.to_string()));
                    } else {
                        let found = el.attr("type");
                        let requirement = match found.map(str::parse::<Requirement>) {
                            Some(Ok(level)) => level,
                            _ => {
                                builder.pending.push(PendingWarning::Unknown {
                                    package: name.to_string(),
                                    found: found.map(str::to_string),
                                });
                                Requirement::Optional
                            }
                        };
                        builder.packages.push(PackageEntry::new(name, requirement));
                    }
                } else if el.is(GROUP) {
                    let builder = current.take().expect("group builder present");
                    let id = match builder.id.filter(|id| !id.is_empty()) {
                        Some(id) => id,
                        None => {
                            failure = Some(IngestError::MissingField {
                                field: "id",
                                context: format!("group #{}", groups.len() + 1),
                            });
                            return Err("group without id".to_string());
                        }
                    };
                    if !ids.insert(id.clone()) {
                        failure = Some(IngestError::DuplicateGroupId(id));
                        return Err("duplicate group id".to_string());
                    }
                    for pending in builder.pending {
                        warnings.push(match pending {
                            PendingWarning::Unknown { package, found } => {
                                ParseWarning::UnknownRequirement {
                                    group: id.clone(),
                                    package,
                                    found,
                                }
                            }
                            PendingWarning::Duplicate(package) => ParseWarning::DuplicateEntry {
                                group: id.clone(),
                                package,
                            },
                            PendingWarning::Empty => ParseWarning::EmptyEntry { group: id.clone() },
                        });
                    }
                    let name = match builder.name {
                        Some(name) => name,
                        None => {
                            warnings.push(ParseWarning::MissingGroupName { group: id.clone() });
                            id.clone()
                        }
                    };
                    groups.push(GroupDef {
                        id,
                        name,
                        description: builder.description.unwrap_or_default(),
                        packages: builder.packages,
                    });
                }
            }
        }
        Ok(())
    });

    if let Some(err) = failure {
        return Err(err);
    }
    walked.map_err(IngestError::MalformedXml)?;
    Ok(Parsed {
        items: groups,
        warnings,
    })
}
