//! Straightforward reference implementations used as test oracles, plus
//! fixture and random-input helpers. Everything here works from plain JSON
//! values and dense vectors and shares no code with the library.
#![allow(dead_code)]

pub mod random;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

// ---------------------------------------------------------------- snapshot

#[derive(Debug, Clone)]
pub struct Group {
    pub id: String,
    pub name: String,
    pub description: String,
    /// (package, weight) in listed order
    pub members: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct Package {
    pub name: String,
    pub description: String,
    pub provides: Vec<String>,
    pub requires: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Snap {
    pub groups: Vec<Group>,
    pub packages: Vec<Package>,
}

fn weight_of(level: &str) -> f64 {
    match level {
        "mandatory" => 0.8,
        "default" => 0.5,
        "optional" => 0.2,
        other => panic!("unknown level {other}"),
    }
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

impl Snap {
    pub fn from_json(v: &Value) -> Snap {
        let groups = v["groups"]
            .as_array()
            .unwrap()
            .iter()
            .map(|g| Group {
                id: g["id"].as_str().unwrap().into(),
                name: g["name"].as_str().unwrap().into(),
                description: g["description"].as_str().unwrap().into(),
                members: g["packages"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|p| {
                        (
                            p["name"].as_str().unwrap().to_string(),
                            weight_of(p["requirement"].as_str().unwrap()),
                        )
                    })
                    .collect(),
            })
            .collect();
        let packages = v["packages"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| Package {
                name: p["name"].as_str().unwrap().into(),
                description: p["description"].as_str().unwrap().into(),
                provides: strings(&p["provides"]),
                requires: strings(&p["requires"]),
            })
            .collect();
        Snap { groups, packages }
    }

    pub fn from_bytes(bytes: &[u8]) -> Snap {
        Snap::from_json(&serde_json::from_slice(bytes).unwrap())
    }

    /// Goes through the serialized form so the oracle never touches
    /// library types directly.
    pub fn of(snapshot: &p2g::ingest::Snapshot) -> Snap {
        Snap::from_json(&serde_json::to_value(snapshot).unwrap())
    }

    fn package(&self, name: &str) -> Option<&Package> {
        self.packages.iter().find(|p| p.name == name)
    }
}

// ---------------------------------------------------------------- text

const STOPWORDS: &str = include_str!("../../src/textvec/stopwords.txt");

pub fn tokens(text: &str) -> Vec<String> {
    let stop: BTreeSet<&str> = STOPWORDS.split_whitespace().collect();
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    let mut word = String::new();
    for c in lower.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() {
            word.push(c);
        } else if !word.is_empty() {
            if !stop.contains(word.as_str()) {
                out.push(word.clone());
            }
            word.clear();
        }
    }
    out
}

/// Dense TF-IDF over a fixed document list.
pub struct Tfidf {
    pub vocab: Vec<String>,
    pub df: Vec<usize>,
    pub n_docs: usize,
}

impl Tfidf {
    pub fn new(docs: &[Vec<String>]) -> Tfidf {
        let vocab: Vec<String> = docs
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let df = vocab
            .iter()
            .map(|w| docs.iter().filter(|d| d.contains(w)).count())
            .collect();
        Tfidf {
            vocab,
            df,
            n_docs: docs.len(),
        }
    }

    pub fn relevance(&self, word: &str, doc: &[String]) -> f64 {
        match self.vocab.iter().position(|w| w == word) {
            None => 0.0,
            Some(i) => {
                let tf = doc.iter().filter(|t| *t == word).count() as f64;
                tf * (self.n_docs as f64 / self.df[i] as f64).ln()
            }
        }
    }

    pub fn vector(&self, doc: &[String]) -> Vec<f64> {
        self.vocab.iter().map(|w| self.relevance(w, doc)).collect()
    }
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot / (nu * nv)
    }
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

// ---------------------------------------------------------------- graph

/// All-pairs hop counts by Floyd–Warshall over package indices.
pub fn all_pairs_hops(snap: &Snap) -> Vec<Vec<Option<usize>>> {
    let n = snap.packages.len();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for (i, p) in snap.packages.iter().enumerate() {
        for cap in &p.requires {
            for (j, q) in snap.packages.iter().enumerate() {
                if i != j && (q.name == *cap || q.provides.contains(cap)) {
                    d[i][j] = Some(1);
                    d[j][i] = Some(1);
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

pub fn undirected_edges(snap: &Snap) -> usize {
    let d = all_pairs_hops(snap);
    let n = d.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| d[i][j] == Some(1))
        .count()
}

// ---------------------------------------------------------------- gvalue

#[derive(Debug, Clone)]
pub struct Scores {
    pub id: String,
    pub com: f64,
    pub rel: f64,
    pub ndif: Option<f64>,
    pub ddif: Option<f64>,
    pub pdif: Option<f64>,
    pub dif: Option<f64>,
    pub dist: f64,
    pub gvalue: f64,
}

fn jaccard_difference(a: &Group, b: &Group) -> f64 {
    let wa: BTreeMap<&str, f64> = a.members.iter().map(|(n, w)| (n.as_str(), *w)).collect();
    let wb: BTreeMap<&str, f64> = b.members.iter().map(|(n, w)| (n.as_str(), *w)).collect();
    let names: BTreeSet<&str> = wa.keys().chain(wb.keys()).copied().collect();
    if names.is_empty() {
        return 0.0;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for n in names {
        match (wa.get(n), wb.get(n)) {
            (Some(x), Some(y)) => {
                num += x.min(*y);
                den += x.max(*y);
            }
            (Some(x), None) | (None, Some(x)) => den += x,
            (None, None) => unreachable!(),
        }
    }
    1.0 - num / den
}

pub fn weighted_jaccard_difference(a: &Group, b: &Group) -> f64 {
    jaccard_difference(a, b)
}

/// Scores every group, in snapshot order.
pub fn gvalues(snap: &Snap) -> Vec<Scores> {
    let mut corpus: Vec<Vec<String>> = snap
        .packages
        .iter()
        .map(|p| tokens(&p.description))
        .collect();
    corpus.extend(snap.groups.iter().map(|g| tokens(&g.description)));
    let tfidf = Tfidf::new(&corpus);
    let hops = all_pairs_hops(snap);
    let pkg_index = |name: &str| snap.packages.iter().position(|p| p.name == name);
    let pkg_vec = |name: &str| {
        snap.package(name)
            .map(|p| tfidf.vector(&tokens(&p.description)))
    };
    let group_vec = |g: &Group| tfidf.vector(&tokens(&g.description));

    let n = snap.groups.len();
    let sizes: Vec<f64> = snap.groups.iter().map(|g| g.members.len() as f64).collect();
    let mean = sizes.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt()
    } else {
        0.0
    };

    snap.groups
        .iter()
        .map(|g| {
            let m = g.members.len();
            let mut com = 0.0;
            if m >= 2 {
                let mut sum = 0.0;
                for (j, (a, _)) in g.members.iter().enumerate() {
                    for (k, (b, _)) in g.members.iter().enumerate() {
                        if j == k {
                            continue;
                        }
                        let (va, vb) = (pkg_vec(a), pkg_vec(b));
                        let sim = match (&va, &vb) {
                            (Some(x), Some(y)) => cosine(x, y),
                            _ => 0.0,
                        };
                        let dep = match (pkg_index(a), pkg_index(b)) {
                            (Some(x), Some(y)) => match hops[x][y] {
                                Some(h) if h > 0 => 1.0 / h as f64,
                                _ => 0.0,
                            },
                            _ => 0.0,
                        };
                        sum += sim.max(dep);
                    }
                }
                com = sum / (m * (m - 1)) as f64;
            }

            let gv = group_vec(g);
            let rel = if m == 0 {
                0.0
            } else {
                g.members
                    .iter()
                    .map(|(p, _)| pkg_vec(p).map_or(0.0, |v| cosine(&gv, &v)))
                    .sum::<f64>()
                    / m as f64
            };

            let others: Vec<&Group> = snap
                .groups
                .iter()
                .filter(|o| !std::ptr::eq(*o, g))
                .collect();
            let (ndif, ddif, pdif) = if n < 2 {
                (None, None, None)
            } else {
                let k = others.len() as f64;
                let ndif = others
                    .iter()
                    .map(|o| {
                        let longest = g.name.chars().count().max(o.name.chars().count());
                        if longest == 0 {
                            0.0
                        } else {
                            levenshtein(&g.name, &o.name) as f64 / longest as f64
                        }
                    })
                    .sum::<f64>()
                    / k;
                let ddif = others
                    .iter()
                    .map(|o| 1.0 - (cosine(&gv, &group_vec(o)) + 1.0) / 2.0)
                    .sum::<f64>()
                    / k;
                let pdif = others.iter().map(|o| jaccard_difference(g, o)).sum::<f64>() / k;
                (Some(ndif), Some(ddif), Some(pdif))
            };
            let dif = ndif.map(|a| (a + ddif.unwrap() + pdif.unwrap()) / 3.0);
            let size = m as f64;
            let dist = if size >= mean - 2.0 * sd && size <= mean + 2.0 * sd {
                1.0
            } else {
                0.0
            };
            let gvalue = match dif {
                Some(d) => (com + rel + d + dist) / 4.0,
                None => (com + rel + dist) / 3.0,
            };
            Scores {
                id: g.id.clone(),
                com,
                rel,
                ndif,
                ddif,
                pdif,
                dif,
                dist,
                gvalue,
            }
        })
        .collect()
}

// ---------------------------------------------------------------- stats

/// Average rank of each value (1-based), ties sharing the mean position.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|x| *x < v).count() as f64;
            let equal = values.iter().filter(|x| *x == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

pub fn spearman_rho(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

// ---------------------------------------------------------------- flows

/// `(s1, s2, o1, o2)` by direct set reasoning on JSON snapshots.
pub fn flows(prev: &Snap, curr: &Snap) -> (usize, usize, usize, usize) {
    let grouped = |s: &Snap| -> BTreeSet<String> {
        s.groups
            .iter()
            .flat_map(|g| g.members.iter().map(|(n, _)| n.clone()))
            .collect()
    };
    let universe =
        |s: &Snap| -> BTreeSet<String> { s.packages.iter().map(|p| p.name.clone()).collect() };
    let (g0, g1) = (grouped(prev), grouped(curr));
    let (u0, u1) = (universe(prev), universe(curr));
    let mut counts = (0, 0, 0, 0);
    for p in g1.difference(&g0) {
        if u0.contains(p) {
            counts.0 += 1
        } else {
            counts.1 += 1
        }
    }
    for p in g0.difference(&g1) {
        if u1.contains(p) {
            counts.2 += 1
        } else {
            counts.3 += 1
        }
    }
    counts
}
