//! Per-version adoption series and Spearman rank correlation.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::ingest::Snapshot;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrendError {
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendPoint {
    pub distribution: String,
    pub version: String,
    pub group_count: usize,
    /// Distinct grouped names that are part of the package universe.
    pub p2g_package_count: usize,
    pub total_package_count: usize,
    pub ratio: f64,
}

impl TrendPoint {
    pub fn of(snapshot: &Snapshot) -> Self {
        let universe = snapshot.universe();
        let grouped = snapshot
            .grouped_names()
            .into_iter()
            .filter(|n| universe.contains(n))
            .count();
        let total = snapshot.packages.len();
        Self {
            distribution: snapshot.distribution.clone(),
            version: snapshot.version.clone(),
            group_count: snapshot.groups.len(),
            p2g_package_count: grouped,
            total_package_count: total,
            ratio: if total == 0 {
                0.0
            } else {
                grouped as f64 / total as f64
            },
        }
    }
}

/// One point per snapshot, in the given order.
pub fn trend_series(snapshots: &[Snapshot]) -> Vec<TrendPoint> {
    snapshots.iter().map(TrendPoint::of).collect()
}

/// `version,groups,p2g_packages,total_packages,ratio`
pub fn write_trends_csv<W: Write>(points: &[TrendPoint], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "version",
        "groups",
        "p2g_packages",
        "total_packages",
        "ratio",
    ])?;
    for p in points {
        writer.write_record([
            p.version.clone(),
            p.group_count.to_string(),
            p.p2g_package_count.to_string(),
            p.total_package_count.to_string(),
            p.ratio.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Mid-ranks (1-based); tied values share the average of their positions.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let denom = (sxx * syy).sqrt();
    (denom > 0.0).then(|| (sxy / denom).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spearman {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
    /// Whether the p-value came from full permutation enumeration.
    pub exact: bool,
}

const EXACT_LIMIT: usize = 8;

/// Spearman's rho (Pearson correlation of mid-ranks) with a two-sided
/// p-value: exact permutation for n ≤ 8, Student-t approximation above.
/// A constant input has no rank variation; rho is then 0 with p = 1.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Spearman, TrendError> {
    if xs.len() != ys.len() {
        return Err(TrendError::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 3 {
        return Err(TrendError::TooFewPoints(n));
    }
    let rx = mid_ranks(xs);
    let ry = mid_ranks(ys);
    let Some(rho) = pearson(&rx, &ry) else {
        return Ok(Spearman {
            rho: 0.0,
            p_value: 1.0,
            n,
            exact: n <= EXACT_LIMIT,
        });
    };

    if n <= EXACT_LIMIT {
        let observed = rho.abs() - 1e-12;
        let mut extreme = 0usize;
        let mut total = 0usize;
        for perm in ry.iter().copied().permutations(n) {
            total += 1;
            if pearson(&rx, &perm).is_some_and(|r| r.abs() >= observed) {
                extreme += 1;
            }
        }
        return Ok(Spearman {
            rho,
            p_value: extreme as f64 / total as f64,
            n,
            exact: true,
        });
    }

    let df = (n - 2) as f64;
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok(Spearman {
        rho,
        p_value,
        n,
        exact: false,
    })
}

#[derive(Debug, Deserialize)]
struct PopularityRow {
    name: String,
    stars: f64,
}

/// Reads a `name,stars` CSV keyed by distribution name.
pub fn read_popularity<R: Read>(input: R) -> csv::Result<BTreeMap<String, f64>> {
    let mut reader = csv::Reader::from_reader(input);
    reader
        .deserialize::<PopularityRow>()
        .map(|row| row.map(|r| (r.name, r.stars)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopularityCorrelation {
    /// `(distribution, stars, median P2G ratio)` for every distribution
    /// present in both the series and the popularity table.
    pub distributions: Vec<(String, f64, f64)>,
    pub spearman: Spearman,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Correlates each distribution's median P2G ratio with its star count.
pub fn popularity_correlation(
    points: &[TrendPoint],
    stars: &BTreeMap<String, f64>,
) -> Result<PopularityCorrelation, TrendError> {
    let mut ratios: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for p in points {
        ratios
            .entry(p.distribution.as_str())
            .or_default()
            .push(p.ratio);
    }
    let lookup: HashMap<&str, f64> = stars.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let distributions: Vec<(String, f64, f64)> = ratios
        .into_iter()
        .filter_map(|(name, mut r)| {
            lookup
                .get(name)
                .map(|&s| (name.to_string(), s, median(&mut r)))
        })
        .collect();
    let xs: Vec<f64> = distributions.iter().map(|d| d.1).collect();
    let ys: Vec<f64> = distributions.iter().map(|d| d.2).collect();
    Ok(PopularityCorrelation {
        spearman: spearman(&xs, &ys)?,
        distributions,
    })
}
