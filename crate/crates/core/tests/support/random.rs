//! Seeded random snapshots for property tests.

use p2g::ingest::{GroupDef, PackageEntry, PackageMeta, Requirement, Snapshot};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

const WORDS: &[&str] = &[
    "desktop",
    "font",
    "kernel",
    "library",
    "server",
    "editor",
    "the",
    "shell",
    "network",
    "audio",
    "graphics",
    "python",
    "tools",
    "of",
    "development",
    "image",
    "system",
    "and",
];
const LETTERS: &[char] = &['a', 'b', 'c', 'k', 'd', 'e', '-', 'é'];
const POOL: usize = 14;

fn text(rng: &mut impl Rng, max_words: usize) -> String {
    let n = rng.random_range(0..=max_words);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn level(rng: &mut impl Rng) -> Requirement {
    *[
        Requirement::Mandatory,
        Requirement::Default,
        Requirement::Optional,
    ]
    .choose(rng)
    .unwrap()
}

fn pkg_name(i: usize) -> String {
    format!("pkg{i}")
}

/// A snapshot with at most `max_groups` groups of at most `max_members`
/// packages; some members are missing from the universe.
pub fn snapshot(rng: &mut impl Rng, max_groups: usize, max_members: usize) -> Snapshot {
    let mut s = Snapshot::new("rand", rng.random_range(1..100u32).to_string());
    for i in 0..POOL {
        if rng.random_bool(0.85) {
            let mut p = PackageMeta::new(pkg_name(i), text(rng, 6));
            for _ in 0..rng.random_range(0..3) {
                let cap = format!("cap{}", rng.random_range(0..6));
                if !p.provides.contains(&cap) {
                    p.provides.push(cap);
                }
            }
            for _ in 0..rng.random_range(0..3) {
                let req = if rng.random_bool(0.5) {
                    format!("cap{}", rng.random_range(0..8))
                } else {
                    pkg_name(rng.random_range(0..POOL))
                };
                if !p.requires.contains(&req) {
                    p.requires.push(req);
                }
            }
            s.packages.push(p);
        }
    }
    let n = rng.random_range(1..=max_groups);
    for i in 0..n {
        let name_len = rng.random_range(0..6);
        let name: String = (0..name_len)
            .map(|_| *LETTERS.choose(rng).unwrap())
            .collect();
        let mut g = GroupDef::new(format!("g{i}"), name, text(rng, 5));
        let mut members: Vec<usize> = (0..POOL).collect();
        members.shuffle(rng);
        for &m in members.iter().take(rng.random_range(0..=max_members)) {
            g.packages.push(PackageEntry::new(pkg_name(m), level(rng)));
        }
        s.groups.push(g);
    }
    s.validate().expect("generator keeps snapshots valid");
    s
}

/// The same snapshot with groups, members and packages reordered.
pub fn shuffled(rng: &mut impl Rng, s: &Snapshot) -> Snapshot {
    let mut t = s.clone();
    t.groups.shuffle(rng);
    for g in &mut t.groups {
        g.packages.shuffle(rng);
    }
    t.packages.shuffle(rng);
    t
}
