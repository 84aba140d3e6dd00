use std::collections::HashMap;

use serde::Serialize;

use super::GValueError;
use crate::depgraph::{degree_from_hops, DependencyGraph};
use crate::ingest::{GroupDef, Requirement, Snapshot};
use crate::textvec::{edit_distance, Embedder, Vector};

/// Membership weight: mandatory 0.8, default 0.5, optional 0.2.
pub fn package_weight(requirement: Requirement) -> f64 {
    match requirement {
        Requirement::Mandatory => 0.8,
        Requirement::Default => 0.5,
        Requirement::Optional => 0.2,
    }
}

/// Group-size statistics of one snapshot. `stddev` is the sample standard
/// deviation (0 for fewer than two groups).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionStats {
    pub mean: f64,
    pub stddev: f64,
    pub lower: f64,
    pub upper: f64,
}

impl DistributionStats {
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let n = sizes.len();
        let mean = if n == 0 {
            0.0
        } else {
            sizes.iter().sum::<usize>() as f64 / n as f64
        };
        let stddev = if n < 2 {
            0.0
        } else {
            let ss: f64 = sizes.iter().map(|&m| (m as f64 - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Self {
            mean,
            stddev,
            lower: mean - 2.0 * stddev,
            upper: mean + 2.0 * stddev,
        }
    }

    pub fn from_groups(groups: &[GroupDef]) -> Self {
        Self::from_sizes(&groups.iter().map(GroupDef::size).collect::<Vec<_>>())
    }
}

/// 1 when the group size lies in `[μ − 2σ, μ + 2σ]`, else 0.
pub fn distribution_value(group: &GroupDef, stats: &DistributionStats) -> u8 {
    let m = group.size() as f64;
    u8::from(m >= stats.lower && m <= stats.upper)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Compactness {
    pub value: f64,
    /// Fewer than two members, so no pair exists.
    pub singleton: bool,
}

/// Description vectors keyed by package name and group id.
#[derive(Default)]
pub(crate) struct VectorCache<'a> {
    pub packages: HashMap<&'a str, Vector>,
    pub groups: HashMap<&'a str, Vector>,
}

impl<'a> VectorCache<'a> {
    pub fn for_snapshot<E: Embedder + ?Sized>(snapshot: &'a Snapshot, embedder: &E) -> Self {
        Self {
            packages: snapshot
                .packages
                .iter()
                .map(|p| (p.name.as_str(), embedder.embed_text(&p.description)))
                .collect(),
            groups: Self::group_vectors(&snapshot.groups, embedder),
        }
    }

    fn group_vectors<E: Embedder + ?Sized>(
        groups: &'a [GroupDef],
        embedder: &E,
    ) -> HashMap<&'a str, Vector> {
        groups
            .iter()
            .map(|g| (g.id.as_str(), embedder.embed_text(&g.description)))
            .collect()
    }

    fn for_members<E: Embedder + ?Sized>(
        group: &'a GroupDef,
        snapshot: &'a Snapshot,
        embedder: &E,
    ) -> Self {
        let mut cache = Self::default();
        for entry in &group.packages {
            if let Some(meta) = snapshot.package(&entry.name) {
                cache
                    .packages
                    .insert(entry.name.as_str(), embedder.embed_text(&meta.description));
            }
        }
        cache
            .groups
            .insert(group.id.as_str(), embedder.embed_text(&group.description));
        cache
    }
}

fn ensure_member(group: &GroupDef, snapshot: &Snapshot) -> Result<(), GValueError> {
    match snapshot.group(&group.id) {
        Some(_) => Ok(()),
        None => Err(GValueError::UnknownGroup(group.id.clone())),
    }
}

/// Pairwise `max(sim, dep)` over members. Members missing from the
/// snapshot score 0 against everything.
pub(crate) fn pair_values<E: Embedder + ?Sized>(
    group: &GroupDef,
    graph: &DependencyGraph,
    embedder: &E,
    cache: &VectorCache<'_>,
) -> Vec<Vec<f64>> {
    let names: Vec<&str> = group.packages.iter().map(|p| p.name.as_str()).collect();
    let m = names.len();
    let mut values = vec![vec![0.0; m]; m];
    for j in 0..m {
        let hops = if graph.contains(names[j]) {
            graph.hops_to(names[j], &names[j + 1..])
        } else {
            vec![None; m - j - 1]
        };
        for k in (j + 1)..m {
            let sim = match (cache.packages.get(names[j]), cache.packages.get(names[k])) {
                (Some(a), Some(b)) => embedder.similarity(a, b),
                _ => 0.0,
            };
            let dep = degree_from_hops(hops[k - j - 1]);
            let value = sim.max(dep);
            values[j][k] = value;
            values[k][j] = value;
        }
    }
    values
}

pub(crate) fn compactness_cached<E: Embedder + ?Sized>(
    group: &GroupDef,
    graph: &DependencyGraph,
    embedder: &E,
    cache: &VectorCache<'_>,
) -> Compactness {
    let m = group.size();
    if m < 2 {
        return Compactness {
            value: 0.0,
            singleton: true,
        };
    }
    let values = pair_values(group, graph, embedder, cache);
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(j, row)| row[j + 1..].iter().sum::<f64>())
        .sum();
    Compactness {
        value: 2.0 * sum / (m * (m - 1)) as f64,
        singleton: false,
    }
}

/// Mean of `max(sim, dep)` over all ordered member pairs `j ≠ k`.
pub fn compactness<E: Embedder + ?Sized>(
    group: &GroupDef,
    graph: &DependencyGraph,
    embedder: &E,
    snapshot: &Snapshot,
) -> Result<Compactness, GValueError> {
    ensure_member(group, snapshot)?;
    let cache = VectorCache::for_members(group, snapshot, embedder);
    Ok(compactness_cached(group, graph, embedder, &cache))
}

pub(crate) fn relevance_cached<E: Embedder + ?Sized>(
    group: &GroupDef,
    embedder: &E,
    cache: &VectorCache<'_>,
) -> Result<f64, GValueError> {
    if group.packages.is_empty() {
        return Err(GValueError::EmptyGroup(group.id.clone()));
    }
    let description = &cache.groups[group.id.as_str()];
    let total: f64 = group
        .packages
        .iter()
        .map(|p| {
            cache
                .packages
                .get(p.name.as_str())
                .map_or(0.0, |v| embedder.similarity(description, v))
        })
        .sum();
    Ok(total / group.size() as f64)
}

/// Mean similarity between the group description and each member's
/// description.
pub fn relevance<E: Embedder + ?Sized>(
    group: &GroupDef,
    embedder: &E,
    snapshot: &Snapshot,
) -> Result<f64, GValueError> {
    ensure_member(group, snapshot)?;
    let cache = VectorCache::for_members(group, snapshot, embedder);
    relevance_cached(group, embedder, &cache)
}

fn others<'a>(group: &GroupDef, all: &'a [GroupDef]) -> Result<Vec<&'a GroupDef>, GValueError> {
    if all.len() < 2 {
        return Err(GValueError::SingletonCorpus);
    }
    if !all.iter().any(|g| g.id == group.id) {
        return Err(GValueError::UnknownGroup(group.id.clone()));
    }
    Ok(all.iter().filter(|g| g.id != group.id).collect())
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn name_difference(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    edit_distance(a, b) as f64 / longest as f64
}

/// Mean normalized edit distance between this group's name and the others'.
pub fn name_differentiation(group: &GroupDef, all: &[GroupDef]) -> Result<f64, GValueError> {
    let others = others(group, all)?;
    Ok(mean(
        others.iter().map(|o| name_difference(&group.name, &o.name)),
    ))
}

pub(crate) fn desc_differentiation_cached<E: Embedder + ?Sized>(
    group: &GroupDef,
    all: &[GroupDef],
    embedder: &E,
    cache: &VectorCache<'_>,
) -> Result<f64, GValueError> {
    let others = others(group, all)?;
    let own = &cache.groups[group.id.as_str()];
    Ok(mean(others.iter().map(|o| {
        let sim = embedder.similarity(own, &cache.groups[o.id.as_str()]);
        1.0 - (sim + 1.0) / 2.0
    })))
}

/// Mean of `1 − (sim + 1) / 2` between description vectors.
pub fn desc_differentiation<E: Embedder + ?Sized>(
    group: &GroupDef,
    all: &[GroupDef],
    embedder: &E,
) -> Result<f64, GValueError> {
    let mut cache = VectorCache {
        groups: VectorCache::group_vectors(all, embedder),
        ..VectorCache::default()
    };
    cache
        .groups
        .entry(group.id.as_str())
        .or_insert_with(|| embedder.embed_text(&group.description));
    desc_differentiation_cached(group, all, embedder, &cache)
}

/// Weighted Jaccard similarity of two package lists: the sum of the smaller
/// weight over shared packages divided by the sum of the larger weight over
/// all packages. Two empty lists are identical (1).
pub fn weighted_jaccard(a: &GroupDef, b: &GroupDef) -> f64 {
    let weights_b: HashMap<&str, f64> = b
        .packages
        .iter()
        .map(|p| (p.name.as_str(), package_weight(p.requirement)))
        .collect();
    let mut shared = 0.0;
    let mut union = 0.0;
    for p in &a.packages {
        let wa = package_weight(p.requirement);
        match weights_b.get(p.name.as_str()) {
            Some(&wb) => {
                shared += wa.min(wb);
                union += wa.max(wb);
            }
            None => union += wa,
        }
    }
    for p in &b.packages {
        if a.requirement_of(&p.name).is_none() {
            union += package_weight(p.requirement);
        }
    }
    if union == 0.0 {
        1.0
    } else {
        shared / union
    }
}

/// Mean weighted-Jaccard distance between package lists.
pub fn pkglist_differentiation(group: &GroupDef, all: &[GroupDef]) -> Result<f64, GValueError> {
    let others = others(group, all)?;
    Ok(mean(
        others.iter().map(|o| 1.0 - weighted_jaccard(group, o)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Differentiation {
    pub ndif: f64,
    pub ddif: f64,
    pub pdif: f64,
    pub dif: f64,
}

impl Differentiation {
    pub fn from_parts(ndif: f64, ddif: f64, pdif: f64) -> Self {
        Self {
            ndif,
            ddif,
            pdif,
            dif: (ndif + ddif + pdif) / 3.0,
        }
    }
}

pub(crate) fn differentiation_cached<E: Embedder + ?Sized>(
    group: &GroupDef,
    all: &[GroupDef],
    embedder: &E,
    cache: &VectorCache<'_>,
) -> Result<Differentiation, GValueError> {
    Ok(Differentiation::from_parts(
        name_differentiation(group, all)?,
        desc_differentiation_cached(group, all, embedder, cache)?,
        pkglist_differentiation(group, all)?,
    ))
}

/// Average of the name, description and package-list differentiation.
pub fn differentiation<E: Embedder + ?Sized>(
    group: &GroupDef,
    all: &[GroupDef],
    embedder: &E,
) -> Result<Differentiation, GValueError> {
    Ok(Differentiation::from_parts(
        name_differentiation(group, all)?,
        desc_differentiation(group, all, embedder)?,
        pkglist_differentiation(group, all)?,
    ))
}
