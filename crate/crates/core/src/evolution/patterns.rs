use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::diff_groups;
use crate::gvalue::{package_weight, weighted_jaccard};
use crate::ingest::{GroupDef, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangePattern {
    Rename,
    Split,
    Merge,
    ReplaceFeature,
    AddFeature,
    RemoveFeature,
}

/// A suggested explanation for a group change. Suggestions come from
/// package-overlap heuristics and carry their confidence and evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangeRecord {
    pub pattern: ChangePattern,
    pub involved_old: Vec<String>,
    pub involved_new: Vec<String>,
    pub confidence: f64,
    pub evidence: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternConfig {
    /// Minimum weighted-Jaccard overlap for a rename.
    pub rename_overlap: f64,
    /// Minimum weighted coverage for split, merge and replace.
    pub coverage: f64,
}

impl Default for PatternConfig {
    fn default() -> Self {
        Self {
            rename_overlap: 0.7,
            coverage: 0.6,
        }
    }
}

/// Share of `target`'s package weight whose names appear in any of `by`.
/// `None` for an empty target.
fn coverage(target: &GroupDef, by: &[&GroupDef]) -> Option<f64> {
    let covered: HashSet<&str> = by
        .iter()
        .flat_map(|g| g.packages.iter().map(|p| p.name.as_str()))
        .collect();
    let total: f64 = target
        .packages
        .iter()
        .map(|p| package_weight(p.requirement))
        .sum();
    if total == 0.0 {
        return None;
    }
    let hit: f64 = target
        .packages
        .iter()
        .filter(|p| covered.contains(p.name.as_str()))
        .map(|p| package_weight(p.requirement))
        .sum();
    Some(hit / total)
}

fn shares_packages(a: &GroupDef, b: &GroupDef) -> bool {
    a.packages
        .iter()
        .any(|p| b.requirement_of(&p.name).is_some())
}

fn quoted(ids: &[String]) -> String {
    ids.iter()
        .map(|id| format!("`{id}`"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn ids(groups: &[&GroupDef]) -> Vec<String> {
    groups.iter().map(|g| g.id.clone()).collect()
}

/// Fan-out of one side into several on the other: `source` covered by the
/// `others` that share packages with it.
fn fan_out<'a>(
    source: &GroupDef,
    others: &'a [GroupDef],
    threshold: f64,
) -> Option<(Vec<&'a GroupDef>, f64)> {
    let parts: Vec<&GroupDef> = others
        .iter()
        .filter(|o| shares_packages(source, o))
        .collect();
    if parts.len() < 2 {
        return None;
    }
    let cover = coverage(source, &parts)?;
    (cover >= threshold).then_some((parts, cover))
}

/// Proposes change patterns for the groups added and removed between two
/// versions. Candidates are accepted greedily by descending confidence so
/// that each group id appears in at most one record; leftovers become
/// add/remove feature records.
pub fn suggest_patterns(
    prev: &Snapshot,
    curr: &Snapshot,
    config: &PatternConfig,
) -> Vec<ChangeRecord> {
    let diff = diff_groups(prev, curr);
    let retained: Vec<&GroupDef> = diff
        .retained
        .iter()
        .filter_map(|id| curr.group(id))
        .collect();
    let mut candidates: Vec<ChangeRecord> = Vec::new();

    for old in &diff.removed {
        for new in &diff.added {
            let overlap = weighted_jaccard(old, new);
            if overlap >= config.rename_overlap {
                candidates.push(ChangeRecord {
                    pattern: ChangePattern::Rename,
                    involved_old: vec![old.id.clone()],
                    involved_new: vec![new.id.clone()],
                    confidence: overlap,
                    evidence: format!(
                        "weighted package overlap {overlap:.3} between `{}` and `{}`",
                        old.id, new.id
                    ),
                });
            }
        }
    }

    for old in &diff.removed {
        if let Some((parts, cover)) = fan_out(old, &diff.added, config.coverage) {
            let new_ids = ids(&parts);
            candidates.push(ChangeRecord {
                pattern: ChangePattern::Split,
                evidence: format!(
                    "{cover:.3} of `{}` package weight reappears in {}",
                    old.id,
                    quoted(&new_ids)
                ),
                involved_old: vec![old.id.clone()],
                involved_new: new_ids,
                confidence: cover,
            });
        }
    }

    for new in &diff.added {
        if let Some((parts, cover)) = fan_out(new, &diff.removed, config.coverage) {
            let old_ids = ids(&parts);
            candidates.push(ChangeRecord {
                pattern: ChangePattern::Merge,
                evidence: format!(
                    "{cover:.3} of `{}` package weight comes from {}",
                    new.id,
                    quoted(&old_ids)
                ),
                involved_old: old_ids,
                involved_new: vec![new.id.clone()],
                confidence: cover,
            });
        }
    }

    for old in &diff.removed {
        let hosts: Vec<(&GroupDef, f64)> = retained
            .iter()
            .filter_map(|t| coverage(old, &[t]).map(|c| (*t, c)))
            .filter(|&(_, c)| c >= config.coverage)
            .collect();
        if let [(host, cover)] = hosts.as_slice() {
            candidates.push(ChangeRecord {
                pattern: ChangePattern::ReplaceFeature,
                involved_old: vec![old.id.clone()],
                involved_new: vec![host.id.clone()],
                confidence: *cover,
                evidence: format!(
                    "{cover:.3} of `{}` package weight is absorbed by retained `{}`",
                    old.id, host.id
                ),
            });
        }
    }

    candidates.sort_by(|a, b| {
        b.confidence
            .partial_cmp(&a.confidence)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.pattern.cmp(&b.pattern))
            .then_with(|| a.involved_old.cmp(&b.involved_old))
            .then_with(|| a.involved_new.cmp(&b.involved_new))
    });

    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut records = Vec::new();
    for candidate in candidates {
        let involved = || candidate.involved_old.iter().chain(&candidate.involved_new);
        if involved().any(|id| used.contains(id)) {
            continue;
        }
        used.extend(involved().cloned());
        records.push(candidate);
    }

    let closest = |group: &GroupDef, pool: &[GroupDef]| -> f64 {
        pool.iter()
            .map(|o| weighted_jaccard(group, o))
            .fold(0.0, f64::max)
    };
    for new in diff.added.iter().filter(|g| !used.contains(&g.id)) {
        let nearest = closest(new, &prev.groups);
        records.push(ChangeRecord {
            pattern: ChangePattern::AddFeature,
            involved_old: vec![],
            involved_new: vec![new.id.clone()],
            confidence: 1.0 - nearest,
            evidence: format!(
                "new group `{}`; closest earlier group overlap {nearest:.3}",
                new.id
            ),
        });
    }
    for old in diff.removed.iter().filter(|g| !used.contains(&g.id)) {
        let nearest = closest(old, &curr.groups);
        records.push(ChangeRecord {
            pattern: ChangePattern::RemoveFeature,
            involved_old: vec![old.id.clone()],
            involved_new: vec![],
            confidence: 1.0 - nearest,
            evidence: format!(
                "group `{}` dropped; closest later group overlap {nearest:.3}",
                old.id
            ),
        });
    }
    records
}
