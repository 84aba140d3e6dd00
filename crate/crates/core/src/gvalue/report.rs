use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{
    compactness_cached, differentiation_cached, distribution_value, relevance_cached,
    DistributionStats, VectorCache,
};
use super::GValueError;
use crate::depgraph::DependencyGraph;
use crate::ingest::{GroupDef, Snapshot};
use crate::textvec::{tokenize, Embedder, TextError, VectorIndex};

pub const DEFAULT_LOW_QUALITY_THRESHOLD: f64 = 0.2;

/// Diagnostics attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFlag {
    /// Fewer than two members; compactness is 0.
    Singleton,
    /// No members; relevance is 0.
    EmptyGroup,
    /// Some members are not in the package universe.
    MissingPackages,
    /// The snapshot has a single group, so differentiation was skipped and
    /// the GValue averages three components.
    DifferentiationAbsent,
    LowQuality,
}

impl ReportFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportFlag::Singleton => "singleton",
            ReportFlag::EmptyGroup => "empty_group",
            ReportFlag::MissingPackages => "missing_packages",
            ReportFlag::DifferentiationAbsent => "differentiation_absent",
            ReportFlag::LowQuality => "low_quality",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GValueReport {
    pub group_id: String,
    pub com: f64,
    pub rel: f64,
    pub ndif: Option<f64>,
    pub ddif: Option<f64>,
    pub pdif: Option<f64>,
    pub dif: Option<f64>,
    pub dist: u8,
    pub gvalue: f64,
    pub flags: Vec<ReportFlag>,
}

impl GValueReport {
    pub fn has_flag(&self, flag: ReportFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// The TF-IDF index over every package and group description of `s`.
pub fn default_index(snapshot: &Snapshot) -> Result<VectorIndex, TextError> {
    let docs: Vec<Vec<String>> = snapshot
        .packages
        .iter()
        .map(|p| tokenize(&p.description))
        .chain(snapshot.groups.iter().map(|g| tokenize(&g.description)))
        .collect();
    VectorIndex::build(&docs)
}

fn score_cached<E: Embedder + ?Sized>(
    group: &GroupDef,
    snapshot: &Snapshot,
    graph: &DependencyGraph,
    embedder: &E,
    stats: &DistributionStats,
    cache: &VectorCache<'_>,
) -> Result<GValueReport, GValueError> {
    if snapshot.group(&group.id).is_none() {
        return Err(GValueError::UnknownGroup(group.id.clone()));
    }
    let mut flags = Vec::new();
    let com = compactness_cached(group, graph, embedder, cache);
    if com.singleton {
        flags.push(ReportFlag::Singleton);
    }
    let rel = match relevance_cached(group, embedder, cache) {
        Ok(rel) => rel,
        Err(GValueError::EmptyGroup(_)) => {
            flags.push(ReportFlag::EmptyGroup);
            0.0
        }
        Err(e) => return Err(e),
    };
    if group
        .packages
        .iter()
        .any(|p| !cache.packages.contains_key(p.name.as_str()))
    {
        flags.push(ReportFlag::MissingPackages);
    }
    let dist = distribution_value(group, stats);
    let report = match differentiation_cached(group, &snapshot.groups, embedder, cache) {
        Ok(d) => GValueReport {
            group_id: group.id.clone(),
            com: com.value,
            rel,
            ndif: Some(d.ndif),
            ddif: Some(d.ddif),
            pdif: Some(d.pdif),
            dif: Some(d.dif),
            dist,
            gvalue: (com.value + rel + d.dif + f64::from(dist)) / 4.0,
            flags,
        },
        Err(GValueError::SingletonCorpus) => {
            flags.push(ReportFlag::DifferentiationAbsent);
            GValueReport {
                group_id: group.id.clone(),
                com: com.value,
                rel,
                ndif: None,
                ddif: None,
                pdif: None,
                dif: None,
                dist,
                gvalue: (com.value + rel + f64::from(dist)) / 3.0,
                flags,
            }
        }
        Err(e) => return Err(e),
    };
    Ok(report)
}

/// Scores one group of `snapshot`. Empty groups score relevance 0 and carry
/// [`ReportFlag::EmptyGroup`] instead of failing.
pub fn score_group<E: Embedder + ?Sized>(
    group: &GroupDef,
    snapshot: &Snapshot,
    graph: &DependencyGraph,
    embedder: &E,
    stats: &DistributionStats,
) -> Result<GValueReport, GValueError> {
    let cache = VectorCache::for_snapshot(snapshot, embedder);
    score_cached(group, snapshot, graph, embedder, stats, &cache)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotScores {
    /// One report per group, ordered by group id.
    pub reports: Vec<GValueReport>,
    /// Reports with `gvalue < threshold`, ascending by gvalue.
    pub low_quality: Vec<GValueReport>,
}

/// Scores every group and marks those below `threshold`, using `embedder`
/// for description similarity.
pub fn score_snapshot_with<E: Embedder + ?Sized>(
    snapshot: &Snapshot,
    embedder: &E,
    threshold: f64,
) -> SnapshotScores {
    let graph = DependencyGraph::build(snapshot);
    let stats = DistributionStats::from_groups(&snapshot.groups);
    let cache = VectorCache::for_snapshot(snapshot, embedder);
    let mut reports: Vec<GValueReport> = snapshot
        .groups
        .par_iter()
        .map(|g| {
            score_cached(g, snapshot, &graph, embedder, &stats, &cache)
                .expect("groups of a valid snapshot always score")
        })
        .collect();
    reports.sort_by(|a, b| a.group_id.cmp(&b.group_id));
    for report in &mut reports {
        if report.gvalue < threshold {
            report.flags.push(ReportFlag::LowQuality);
        }
    }
    let mut low_quality: Vec<GValueReport> = reports
        .iter()
        .filter(|r| r.has_flag(ReportFlag::LowQuality))
        .cloned()
        .collect();
    low_quality.sort_by(|a, b| {
        a.gvalue
            .partial_cmp(&b.gvalue)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.group_id.cmp(&b.group_id))
    });
    SnapshotScores {
        reports,
        low_quality,
    }
}

/// [`score_snapshot_with`] using the snapshot's own TF-IDF index.
pub fn score_snapshot(snapshot: &Snapshot, threshold: f64) -> SnapshotScores {
    match default_index(snapshot) {
        Ok(index) => score_snapshot_with(snapshot, &index, threshold),
        Err(TextError::EmptyCorpus) => SnapshotScores {
            reports: Vec::new(),
            low_quality: Vec::new(),
        },
    }
}

fn cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per report: `group_id,com,rel,ndif,ddif,pdif,dif,dist,gvalue,flags`
/// with flags joined by `;` and absent values left empty.
pub fn write_reports_csv<W: Write>(reports: &[GValueReport], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "group_id", "com", "rel", "ndif", "ddif", "pdif", "dif", "dist", "gvalue", "flags",
    ])?;
    for r in reports {
        let flags: Vec<&str> = r.flags.iter().map(|f| f.as_str()).collect();
        writer.write_record([
            r.group_id.clone(),
            r.com.to_string(),
            r.rel.to_string(),
            cell(r.ndif),
            cell(r.ddif),
            cell(r.pdif),
            cell(r.dif),
            r.dist.to_string(),
            r.gvalue.to_string(),
            flags.join(";"),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{PackageMeta, Requirement};

    fn copies(n: usize) -> Snapshot {
        let mut s = Snapshot::new("d", "1");
        s.packages.push(PackageMeta::new("a", "shell tools"));
        s.packages.push(PackageMeta::new("b", "shell library"));
        for i in 0..n {
            let mut g = GroupDef::new(format!("g{i}"), "Same", "shell tools");
            g = g
                .with_package("a", Requirement::Mandatory)
                .with_package("b", Requirement::Default);
            s.groups.push(g);
        }
        s
    }

    #[test]
    fn identical_groups_do_not_differ() {
        let scores = score_snapshot(&copies(4), DEFAULT_LOW_QUALITY_THRESHOLD);
        assert_eq!(scores.reports.len(), 4);
        for r in &scores.reports {
            assert_eq!(r.ndif, Some(0.0));
            assert!(r.ddif.unwrap().abs() < 1e-15);
            assert_eq!(r.pdif, Some(0.0));
            assert!(r.dif.unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn zero_threshold_flags_nothing() {
        let scores = score_snapshot(&copies(3), 0.0);
        assert!(scores.low_quality.is_empty());
        let all = score_snapshot(&copies(3), 1.01);
        assert_eq!(all.low_quality.len(), 3);
    }

    #[test]
    fn single_group_fuses_three_components() {
        let scores = score_snapshot(&copies(1), DEFAULT_LOW_QUALITY_THRESHOLD);
        let r = &scores.reports[0];
        assert_eq!(r.dif, None);
        assert!(r.has_flag(ReportFlag::DifferentiationAbsent));
        assert!((r.gvalue - (r.com + r.rel + f64::from(r.dist)) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_snapshot_scores_nothing() {
        let scores = score_snapshot(&Snapshot::new("d", "1"), 0.2);
        assert!(scores.reports.is_empty());
    }

    #[test]
    fn empty_group_is_flagged() {
        let mut s = copies(2);
        s.groups.push(GroupDef::new("empty", "Empty", "nothing"));
        let scores = score_snapshot(&s, 0.2);
        let r = scores
            .reports
            .iter()
            .find(|r| r.group_id == "empty")
            .unwrap();
        assert_eq!(r.rel, 0.0);
        assert!(r.has_flag(ReportFlag::EmptyGroup));
        assert!(r.has_flag(ReportFlag::Singleton));
    }

    #[test]
    fn csv_layout() {
        let scores = score_snapshot(&copies(1), 0.2);
        let mut out = Vec::new();
        write_reports_csv(&scores.reports, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("group_id,com,rel,ndif,ddif,pdif,dif,dist,gvalue,flags")
        );
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 10);
        assert_eq!(row[0], "g0");
        assert_eq!(row[3], "");
        assert_eq!(row[9], "differentiation_absent");
    }
}
