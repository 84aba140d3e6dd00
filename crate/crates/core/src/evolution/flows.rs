use std::collections::{BTreeSet, HashSet};
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Snapshot;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("no flow reports to aggregate")]
    EmptyInput,
}

/// Package flows between two versions.
///
/// `ap` holds names grouped in the newer version but not the older, `rp`
/// the reverse. Each `ap` name is S1 when the older universe already had it
/// and S2 otherwise; each `rp` name is O1 when the newer universe still has
/// it and O2 otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowReport {
    pub prev_version: String,
    pub curr_version: String,
    pub s1: usize,
    pub s2: usize,
    pub o1: usize,
    pub o2: usize,
    pub ap: Vec<String>,
    pub rp: Vec<String>,
}

pub fn classify_flows(prev: &Snapshot, curr: &Snapshot) -> FlowReport {
    let grouped_before: BTreeSet<&str> = prev.grouped_names().into_iter().collect();
    let grouped_after: BTreeSet<&str> = curr.grouped_names().into_iter().collect();
    let universe_before: HashSet<&str> = prev.universe();
    let universe_after: HashSet<&str> = curr.universe();

    let ap: Vec<String> = grouped_after
        .difference(&grouped_before)
        .map(|s| s.to_string())
        .collect();
    let rp: Vec<String> = grouped_before
        .difference(&grouped_after)
        .map(|s| s.to_string())
        .collect();
    let s1 = ap
        .iter()
        .filter(|p| universe_before.contains(p.as_str()))
        .count();
    let o1 = rp
        .iter()
        .filter(|p| universe_after.contains(p.as_str()))
        .count();
    FlowReport {
        prev_version: prev.version.clone(),
        curr_version: curr.version.clone(),
        s1,
        s2: ap.len() - s1,
        o1,
        o2: rp.len() - o1,
        ap,
        rp,
    }
}

/// Summed flow counts with each class as a share of the grand total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowAggregate {
    pub s1: usize,
    pub s2: usize,
    pub o1: usize,
    pub o2: usize,
    pub total: usize,
    pub s1_pct: f64,
    pub s2_pct: f64,
    pub o1_pct: f64,
    pub o2_pct: f64,
    /// Set when nothing flowed; all percentages are then 0.
    pub zero_total: bool,
}

pub fn aggregate_flows(reports: &[FlowReport]) -> Result<FlowAggregate, FlowError> {
    if reports.is_empty() {
        return Err(FlowError::EmptyInput);
    }
    let s1: usize = reports.iter().map(|r| r.s1).sum();
    let s2: usize = reports.iter().map(|r| r.s2).sum();
    let o1: usize = reports.iter().map(|r| r.o1).sum();
    let o2: usize = reports.iter().map(|r| r.o2).sum();
    let total = s1 + s2 + o1 + o2;
    let pct = |count: usize| {
        if total == 0 {
            0.0
        } else {
            100.0 * count as f64 / total as f64
        }
    };
    Ok(FlowAggregate {
        s1,
        s2,
        o1,
        o2,
        total,
        s1_pct: pct(s1),
        s2_pct: pct(s2),
        o1_pct: pct(o1),
        o2_pct: pct(o2),
        zero_total: total == 0,
    })
}

/// `prev_version,curr_version,s1,s2,o1,o2`, one row per version pair.
pub fn write_flows_csv<W: Write>(reports: &[FlowReport], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["prev_version", "curr_version", "s1", "s2", "o1", "o2"])?;
    for r in reports {
        writer.write_record([
            r.prev_version.clone(),
            r.curr_version.clone(),
            r.s1.to_string(),
            r.s2.to_string(),
            r.o1.to_string(),
            r.o2.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{GroupDef, PackageMeta, Requirement};

    fn report(s1: usize, s2: usize, o1: usize, o2: usize) -> FlowReport {
        FlowReport {
            prev_version: "a".into(),
            curr_version: "b".into(),
            s1,
            s2,
            o1,
            o2,
            ap: vec![],
            rp: vec![],
        }
    }

    #[test]
    fn identical_snapshots_have_no_flow() {
        let mut s = Snapshot::new("d", "1");
        s.packages.push(PackageMeta::new("a", ""));
        s.groups
            .push(GroupDef::new("g", "G", "").with_package("a", Requirement::Default));
        let r = classify_flows(&s, &s);
        assert_eq!((r.s1, r.s2, r.o1, r.o2), (0, 0, 0, 0));
    }

    #[test]
    fn brand_new_grouped_package_is_s2() {
        let prev = Snapshot::new("d", "1");
        let mut curr = Snapshot::new("d", "2");
        curr.packages.push(PackageMeta::new("x", ""));
        curr.groups
            .push(GroupDef::new("g", "G", "").with_package("x", Requirement::Default));
        let r = classify_flows(&prev, &curr);
        assert_eq!((r.s1, r.s2, r.o1, r.o2), (0, 1, 0, 0));
        assert_eq!(r.ap, ["x"]);
    }

    #[test]
    fn aggregate_shares() {
        let agg = aggregate_flows(&[report(1, 1, 1, 1)]).unwrap();
        assert_eq!(
            (agg.s1_pct, agg.s2_pct, agg.o1_pct, agg.o2_pct),
            (25.0, 25.0, 25.0, 25.0)
        );
        let zero = aggregate_flows(&[report(0, 0, 0, 0), report(0, 0, 0, 0)]).unwrap();
        assert!(zero.zero_total);
        assert_eq!(zero.s1_pct + zero.s2_pct + zero.o1_pct + zero.o2_pct, 0.0);
        assert_eq!(aggregate_flows(&[]), Err(FlowError::EmptyInput));
    }

    #[test]
    fn aggregate_percentages_sum_to_100() {
        let agg = aggregate_flows(&[report(3, 1, 0, 7), report(2, 0, 5, 1)]).unwrap();
        assert_eq!(agg.total, 19);
        let sum = agg.s1_pct + agg.s2_pct + agg.o1_pct + agg.o2_pct;
        assert!((sum - 100.0).abs() < 1e-9);
    }
}
