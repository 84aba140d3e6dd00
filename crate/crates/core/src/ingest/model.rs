use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// How essential a package is to the group that lists it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Requirement {
    Mandatory,
    Default,
    Optional,
}

impl Requirement {
    pub fn as_str(self) -> &'static str {
        match self {
            Requirement::Mandatory => "mandatory",
            Requirement::Default => "default",
            Requirement::Optional => "optional",
        }
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Requirement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mandatory" => Ok(Requirement::Mandatory),
            "default" => Ok(Requirement::Default),
            "optional" => Ok(Requirement::Optional),
            other => Err(format!("unknown requirement level `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackageEntry {
    pub name: String,
    pub requirement: Requirement,
}

impl PackageEntry {
    pub fn new(name: impl Into<String>, requirement: Requirement) -> Self {
        Self {
            name: name.into(),
            requirement,
        }
    }
}

/// A comps group: display name, free-text description and typed member list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDef {
    pub id: String,
    pub name: String,
    pub description: String,
    pub packages: Vec<PackageEntry>,
}

impl GroupDef {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        description: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            description: description.into(),
            packages: Vec::new(),
        }
    }

    pub fn with_package(mut self, name: impl Into<String>, requirement: Requirement) -> Self {
        self.packages.push(PackageEntry::new(name, requirement));
        self
    }

    /// Number of member packages.
    pub fn size(&self) -> usize {
        self.packages.len()
    }

    pub fn requirement_of(&self, package: &str) -> Option<Requirement> {
        self.packages
            .iter()
            .find(|p| p.name == package)
            .map(|p| p.requirement)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackageMeta {
    pub name: String,
    pub description: String,
    pub provides: Vec<String>,
    pub requires: Vec<String>,
}

impl PackageMeta {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            provides: Vec::new(),
            requires: Vec::new(),
        }
    }
}

/// One distribution version: every group and the full package universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub distribution: String,
    pub version: String,
    pub groups: Vec<GroupDef>,
    pub packages: Vec<PackageMeta>,
}

impl Snapshot {
    pub fn new(distribution: impl Into<String>, version: impl Into<String>) -> Self {
        Self {
            distribution: distribution.into(),
            version: version.into(),
            groups: Vec::new(),
            packages: Vec::new(),
        }
    }

    pub fn group(&self, id: &str) -> Option<&GroupDef> {
        self.groups.iter().find(|g| g.id == id)
    }

    pub fn package(&self, name: &str) -> Option<&PackageMeta> {
        self.packages.iter().find(|p| p.name == name)
    }

    /// Names of the total package universe.
    pub fn universe(&self) -> HashSet<&str> {
        self.packages.iter().map(|p| p.name.as_str()).collect()
    }

    /// Distinct package names listed by at least one group.
    pub fn grouped_names(&self) -> HashSet<&str> {
        self.groups
            .iter()
            .flat_map(|g| g.packages.iter().map(|p| p.name.as_str()))
            .collect()
    }

    /// Checks the structural invariants, returning the first violation found.
    pub fn validate(&self) -> Result<(), String> {
        let mut ids = HashSet::new();
        for group in &self.groups {
            if group.id.is_empty() {
                return Err("group with empty id".to_string());
            }
            if !ids.insert(group.id.as_str()) {
                return Err(format!("duplicate group id `{}`", group.id));
            }
            let mut members = HashSet::new();
            for entry in &group.packages {
                if entry.name.is_empty() {
                    return Err(format!(
                        "group `{}` has a package entry with an empty name",
                        group.id
                    ));
                }
                if !members.insert(entry.name.as_str()) {
                    return Err(format!(
                        "group `{}` lists package `{}` more than once",
                        group.id, entry.name
                    ));
                }
            }
        }
        let mut names = HashSet::new();
        for package in &self.packages {
            if package.name.is_empty() {
                return Err("package with empty name".to_string());
            }
            if !names.insert(package.name.as_str()) {
                return Err(format!("duplicate package name `{}`", package.name));
            }
        }
        Ok(())
    }
}
