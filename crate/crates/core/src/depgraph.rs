//! Undirected package dependency graph built from provides/requires.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::ingest::Snapshot;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown package `{0}`")]
    UnknownNode(String),
    #[error("dependency degree of `{0}` with itself is undefined")]
    SamePackage(String),
}

/// A requirement that no package in the snapshot satisfies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Unresolved {
    pub package: String,
    pub capability: String,
}

#[derive(Debug, Clone)]
pub struct DependencyGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<BTreeSet<usize>>,
    unresolved: Vec<Unresolved>,
}

impl DependencyGraph {
    /// Links every package to each provider of each capability it requires.
    /// A capability is provided by a package that lists it in `provides` or
    /// whose name equals it. Self-edges are dropped.
    pub fn build(snapshot: &Snapshot) -> Self {
        let nodes: Vec<String> = snapshot.packages.iter().map(|p| p.name.clone()).collect();
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();

        let mut providers: HashMap<&str, BTreeSet<usize>> = HashMap::new();
        for (i, package) in snapshot.packages.iter().enumerate() {
            providers
                .entry(package.name.as_str())
                .or_default()
                .insert(i);
            for cap in &package.provides {
                providers.entry(cap.as_str()).or_default().insert(i);
            }
        }

        let mut adjacency = vec![BTreeSet::new(); nodes.len()];
        let mut unresolved = Vec::new();
        for (i, package) in snapshot.packages.iter().enumerate() {
            for cap in &package.requires {
                match providers.get(cap.as_str()) {
                    Some(found) => {
                        for &j in found.iter().filter(|&&j| j != i) {
                            adjacency[i].insert(j);
                            adjacency[j].insert(i);
                        }
                    }
                    None => unresolved.push(Unresolved {
                        package: package.name.clone(),
                        capability: cap.clone(),
                    }),
                }
            }
        }

        Self {
            nodes,
            index,
            adjacency,
            unresolved,
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn unresolved(&self) -> &[Unresolved] {
        &self.unresolved
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, name: &str) -> Result<impl Iterator<Item = &str> + '_, GraphError> {
        let i = self.node(name)?;
        Ok(self.adjacency[i].iter().map(|&j| self.nodes[j].as_str()))
    }

    fn node(&self, name: &str) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    /// Hop counts from `name` to every node (BFS); `None` where unreachable.
    pub fn hops_from(&self, name: &str) -> Result<HashMap<&str, usize>, GraphError> {
        let start = self.node(name)?;
        let mut dist: Vec<Option<usize>> = vec![None; self.nodes.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let next = dist[u].expect("queued nodes have a distance") + 1;
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(next);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist
            .into_iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (self.nodes[i].as_str(), d)))
            .collect())
    }

    /// Hop counts from `source` to each of `targets`, stopping the search
    /// once every reachable target is found. Unknown names map to `None`.
    pub fn hops_to(&self, source: &str, targets: &[&str]) -> Vec<Option<usize>> {
        let mut result = vec![None; targets.len()];
        let Some(&start) = self.index.get(source) else {
            return result;
        };
        let mut wanted: HashMap<usize, Vec<usize>> = HashMap::new();
        for (slot, t) in targets.iter().enumerate() {
            if let Some(&i) = self.index.get(*t) {
                wanted.entry(i).or_default().push(slot);
            }
        }
        let mut remaining = wanted.len();
        let mut dist: Vec<Option<usize>> = vec![None; self.nodes.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have a distance");
            if let Some(slots) = wanted.get(&u) {
                for &slot in slots {
                    result[slot] = Some(d);
                }
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        result
    }

    /// Length of the shortest undirected path, `None` if disconnected.
    pub fn shortest_hops(&self, a: &str, b: &str) -> Result<Option<usize>, GraphError> {
        let target = self.node(b)?;
        Ok(self.hops_from(a)?.get(self.nodes[target].as_str()).copied())
    }

    /// `1 / hops`, or 0 when the pair is disconnected.
    pub fn dependency_degree(&self, a: &str, b: &str) -> Result<f64, GraphError> {
        if a == b {
            self.node(a)?;
            return Err(GraphError::SamePackage(a.to_string()));
        }
        Ok(degree_from_hops(self.shortest_hops(a, b)?))
    }
}

pub(crate) fn degree_from_hops(hops: Option<usize>) -> f64 {
    match hops {
        Some(0) | None => 0.0,
        Some(h) => 1.0 / h as f64,
    }
}

pub fn build_graph(snapshot: &Snapshot) -> DependencyGraph {
    DependencyGraph::build(snapshot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::PackageMeta;

    fn pkg(name: &str, provides: &[&str], requires: &[&str]) -> PackageMeta {
        PackageMeta {
            name: name.into(),
            description: String::new(),
            provides: provides.iter().map(|s| s.to_string()).collect(),
            requires: requires.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn snapshot(packages: Vec<PackageMeta>) -> Snapshot {
        let mut s = Snapshot::new("t", "1");
        s.packages = packages;
        s
    }

    #[test]
    fn capability_edge() {
        let g = build_graph(&snapshot(vec![
            pkg("A", &[], &["libx"]),
            pkg("B", &["libx"], &[]),
        ]));
        assert_eq!(g.neighbors("A").unwrap().collect::<Vec<_>>(), ["B"]);
        assert_eq!(g.neighbors("B").unwrap().collect::<Vec<_>>(), ["A"]);
        assert_eq!(g.shortest_hops("A", "B").unwrap(), Some(1));
        assert_eq!(g.dependency_degree("A", "B").unwrap(), 1.0);
    }

    #[test]
    fn self_requirement_is_dropped_silently() {
        let g = build_graph(&snapshot(vec![pkg("A", &[], &["A"])]));
        assert_eq!(g.edge_count(), 0);
        assert!(g.unresolved().is_empty());
    }

    #[test]
    fn unresolved_recorded() {
        let g = build_graph(&snapshot(vec![pkg("A", &[], &["nope"])]));
        assert_eq!(
            g.unresolved(),
            [Unresolved {
                package: "A".into(),
                capability: "nope".into()
            }]
        );
    }

    #[test]
    fn chain_and_disconnected() {
        let g = build_graph(&snapshot(vec![
            pkg("A", &[], &["B"]),
            pkg("B", &[], &["C"]),
            pkg("C", &[], &[]),
            pkg("D", &[], &[]),
        ]));
        assert_eq!(g.shortest_hops("A", "C").unwrap(), Some(2));
        assert_eq!(g.shortest_hops("A", "A").unwrap(), Some(0));
        assert_eq!(g.dependency_degree("A", "C").unwrap(), 0.5);
        assert_eq!(g.shortest_hops("A", "D").unwrap(), None);
        assert_eq!(g.dependency_degree("A", "D").unwrap(), 0.0);
        assert_eq!(
            g.hops_to("A", &["C", "D", "A", "B", "Z"]),
            [Some(2), None, Some(0), Some(1), None]
        );
    }

    #[test]
    fn errors() {
        let g = build_graph(&snapshot(vec![pkg("A", &[], &[])]));
        assert_eq!(
            g.shortest_hops("A", "Z"),
            Err(GraphError::UnknownNode("Z".into()))
        );
        assert_eq!(
            g.dependency_degree("A", "A"),
            Err(GraphError::SamePackage("A".into()))
        );
        assert_eq!(
            g.dependency_degree("Z", "Z"),
            Err(GraphError::UnknownNode("Z".into()))
        );
    }
}
