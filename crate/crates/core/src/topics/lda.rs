use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::TopicError;

/// A fitted collapsed-Gibbs LDA model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicModel {
    pub topic_count: usize,
    /// Terms in lexicographic order; column `w` of `topic_word` is `vocabulary[w]`.
    pub vocabulary: Vec<String>,
    pub topic_word: Vec<Vec<f64>>,
    pub doc_topic: Vec<Vec<f64>>,
    /// Final topic of every token, per document.
    pub assignments: Vec<Vec<usize>>,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
}

/// Sampler settings. `alpha: None` means `50 / K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaSettings {
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    pub top_n: usize,
}

impl Default for LdaSettings {
    fn default() -> Self {
        Self {
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            seed: 42,
            top_n: 10,
        }
    }
}

impl LdaSettings {
    pub fn alpha_for(&self, k: usize) -> f64 {
        self.alpha.unwrap_or(50.0 / k as f64)
    }
}

/// Fits LDA by collapsed Gibbs sampling.
///
/// The chain is driven by ChaCha8 seeded with `seed`, so a given input
/// produces the same model on every platform. Distributions are read off
/// the final state: `φ = (n_kw + β) / (n_k + Vβ)`, `θ = (n_dk + α) / (n_d + Kα)`.
pub fn fit_lda<D: AsRef<[String]>>(
    docs: &[D],
    k: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    seed: u64,
) -> Result<TopicModel, TopicError> {
    if k == 0 {
        return Err(TopicError::BadHyperparam(
            "topic count must be at least 1".into(),
        ));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(TopicError::BadHyperparam(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(TopicError::BadHyperparam(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if iterations == 0 {
        return Err(TopicError::BadHyperparam(
            "iterations must be at least 1".into(),
        ));
    }

    let mut vocab: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        for token in doc.as_ref() {
            vocab.entry(token.as_str()).or_insert(0);
        }
    }
    if vocab.is_empty() {
        return Err(TopicError::EmptyCorpus);
    }
    for (i, slot) in vocab.values_mut().enumerate() {
        *slot = i;
    }
    let v = vocab.len();
    let words: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.as_ref().iter().map(|t| vocab[t.as_str()]).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc_counts = vec![vec![0usize; k]; words.len()];
    let mut word_counts = vec![vec![0usize; v]; k];
    let mut topic_totals = vec![0usize; k];
    let mut assignments: Vec<Vec<usize>> = Vec::with_capacity(words.len());
    for (d, doc) in words.iter().enumerate() {
        let mut z = Vec::with_capacity(doc.len());
        for &w in doc {
            let t = rng.random_range(0..k);
            doc_counts[d][t] += 1;
            word_counts[t][w] += 1;
            topic_totals[t] += 1;
            z.push(t);
        }
        assignments.push(z);
    }

    let vbeta = v as f64 * beta;
    let mut weights = vec![0.0; k];
    for _ in 0..iterations {
        for (d, doc) in words.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = assignments[d][i];
                doc_counts[d][old] -= 1;
                word_counts[old][w] -= 1;
                topic_totals[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    total += (doc_counts[d][t] as f64 + alpha) * (word_counts[t][w] as f64 + beta)
                        / (topic_totals[t] as f64 + vbeta);
                    weights[t] = total;
                }
                let u = rng.random::<f64>() * total;
                let new = weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                assignments[d][i] = new;
                doc_counts[d][new] += 1;
                word_counts[new][w] += 1;
                topic_totals[new] += 1;
            }
        }
    }

    let topic_word = (0..k)
        .map(|t| {
            let denom = topic_totals[t] as f64 + vbeta;
            (0..v)
                .map(|w| (word_counts[t][w] as f64 + beta) / denom)
                .collect()
        })
        .collect();
    let kalpha = k as f64 * alpha;
    let doc_topic = words
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            let denom = doc.len() as f64 + kalpha;
            (0..k)
                .map(|t| (doc_counts[d][t] as f64 + alpha) / denom)
                .collect()
        })
        .collect();

    Ok(TopicModel {
        topic_count: k,
        vocabulary: vocab.keys().map(|s| s.to_string()).collect(),
        topic_word,
        doc_topic,
        assignments,
        seed,
        alpha,
        beta,
        iterations,
    })
}
