//! Version-to-version evolution: group additions and removals, package
//! flows into and out of groups, and change-pattern suggestions.

mod flows;
mod patterns;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ingest::{GroupDef, Snapshot};

pub use flows::{
    aggregate_flows, classify_flows, write_flows_csv, FlowAggregate, FlowError, FlowReport,
};
pub use patterns::{suggest_patterns, ChangePattern, ChangeRecord, PatternConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupDiff {
    pub added: Vec<GroupDef>,
    pub removed: Vec<GroupDef>,
    pub retained: Vec<String>,
}

/// Splits the union of group ids into added, removed and retained, each
/// sorted by id.
pub fn diff_groups(prev: &Snapshot, curr: &Snapshot) -> GroupDiff {
    let before: BTreeMap<&str, &GroupDef> =
        prev.groups.iter().map(|g| (g.id.as_str(), g)).collect();
    let after: BTreeMap<&str, &GroupDef> = curr.groups.iter().map(|g| (g.id.as_str(), g)).collect();
    GroupDiff {
        added: after
            .iter()
            .filter(|(id, _)| !before.contains_key(*id))
            .map(|(_, g)| (*g).clone())
            .collect(),
        removed: before
            .iter()
            .filter(|(id, _)| !after.contains_key(*id))
            .map(|(_, g)| (*g).clone())
            .collect(),
        retained: before
            .keys()
            .filter(|id| after.contains_key(*id))
            .map(|id| id.to_string())
            .collect(),
    }
}
