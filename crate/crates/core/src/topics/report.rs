use std::collections::BTreeSet;

use serde::Serialize;

use super::coherence::{select_topic_count, top_words, KScore};
use super::lda::LdaSettings;
use super::TopicError;
use crate::ingest::Snapshot;
use crate::textvec::tokenize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordWeight {
    pub word: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicSummary {
    pub topic: usize,
    pub top_words: Vec<WordWeight>,
}

/// Top words shared by a pair of topics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicOverlap {
    pub a: usize,
    pub b: usize,
    pub shared: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicReport {
    pub documents: usize,
    pub seed: u64,
    pub beta: f64,
    pub iterations: usize,
    pub top_n: usize,
    pub coherence: Vec<KScore>,
    pub best_k: usize,
    pub alpha: f64,
    pub topics: Vec<TopicSummary>,
    pub overlap: Vec<TopicOverlap>,
}

/// One token sequence per group description, in snapshot order.
pub fn group_documents(snapshot: &Snapshot) -> Vec<Vec<String>> {
    snapshot
        .groups
        .iter()
        .map(|g| tokenize(&g.description))
        .collect()
}

/// Scans `k_min..=k_max` over the group descriptions and summarises the
/// most coherent model.
pub fn topic_report(
    snapshot: &Snapshot,
    k_min: usize,
    k_max: usize,
    settings: &LdaSettings,
) -> Result<TopicReport, TopicError> {
    let docs = group_documents(snapshot);
    let scan = select_topic_count(&docs, k_min, k_max, settings)?;
    let model = &scan.best_model;

    let tops: Vec<Vec<(&str, f64)>> = (0..model.topic_count)
        .map(|t| top_words(model, t, settings.top_n))
        .collect();
    let topics = tops
        .iter()
        .enumerate()
        .map(|(topic, words)| TopicSummary {
            topic,
            top_words: words
                .iter()
                .map(|&(w, p)| WordWeight {
                    word: w.to_string(),
                    probability: p,
                })
                .collect(),
        })
        .collect();

    let sets: Vec<BTreeSet<&str>> = tops
        .iter()
        .map(|t| t.iter().map(|&(w, _)| w).collect())
        .collect();
    let mut overlap = Vec::new();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            overlap.push(TopicOverlap {
                a,
                b,
                shared: sets[a]
                    .intersection(&sets[b])
                    .map(|w| w.to_string())
                    .collect(),
            });
        }
    }

    Ok(TopicReport {
        documents: docs.len(),
        seed: settings.seed,
        beta: settings.beta,
        iterations: settings.iterations,
        top_n: settings.top_n,
        coherence: scan.scores.clone(),
        best_k: scan.best_k,
        alpha: model.alpha,
        topics,
        overlap,
    })
}
