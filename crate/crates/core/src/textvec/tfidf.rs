use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::tokenize::tokenize;
use super::TextError;

/// Sparse vector: dimension -> weight. Zero weights are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vector {
    weights: BTreeMap<usize, f64>,
}

impl Vector {
    pub fn from_weights(weights: impl IntoIterator<Item = (usize, f64)>) -> Self {
        Self {
            weights: weights.into_iter().filter(|&(_, w)| w != 0.0).collect(),
        }
    }

    pub fn get(&self, dim: usize) -> f64 {
        self.weights.get(&dim).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().map(|(&d, &w)| (d, w))
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        let (small, large) = if self.weights.len() <= other.weights.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .weights
            .iter()
            .filter_map(|(d, w)| large.weights.get(d).map(|v| w * v))
            .sum()
    }

    fn squared_norm(&self) -> f64 {
        self.weights.values().map(|w| w * w).sum()
    }
}

/// Cosine similarity, 0 when either vector is zero.
pub fn cosine_similarity(u: &Vector, v: &Vector) -> f64 {
    let denom = (u.squared_norm() * v.squared_norm()).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (u.dot(v) / denom).clamp(-1.0, 1.0)
}

/// Text embedding backend feeding the similarity-based metrics.
///
/// Implementations must state the range of [`Embedder::similarity`]. The
/// shipped TF-IDF backend has nonnegative weights, so its similarity lies
/// in [0, 1].
pub trait Embedder: Sync {
    fn embed_text(&self, text: &str) -> Vector;

    fn similarity(&self, a: &Vector, b: &Vector) -> f64 {
        cosine_similarity(a, b)
    }
}

/// Vocabulary and document frequencies of a tokenized corpus. Dimensions
/// follow the lexicographic order of the vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    vocabulary: BTreeMap<String, usize>,
    doc_frequencies: Vec<usize>,
    corpus_size: usize,
}

impl VectorIndex {
    pub fn build<D: AsRef<[String]>>(docs: &[D]) -> Result<Self, TextError> {
        if docs.is_empty() {
            return Err(TextError::EmptyCorpus);
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let distinct: HashSet<&str> = doc.as_ref().iter().map(String::as_str).collect();
            for term in distinct {
                *counts.entry(term).or_default() += 1;
            }
        }
        let mut vocabulary = BTreeMap::new();
        let mut doc_frequencies = Vec::with_capacity(counts.len());
        for (dim, (term, df)) in counts.into_iter().enumerate() {
            vocabulary.insert(term.to_string(), dim);
            doc_frequencies.push(df);
        }
        Ok(Self {
            vocabulary,
            doc_frequencies,
            corpus_size: docs.len(),
        })
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn dimension(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).copied()
    }

    pub fn doc_frequency(&self, term: &str) -> usize {
        self.dimension(term).map_or(0, |d| self.doc_frequencies[d])
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.vocabulary.keys().map(String::as_str)
    }

    /// Natural-log inverse document frequency, `None` out of vocabulary.
    pub fn idf(&self, term: &str) -> Option<f64> {
        self.dimension(term)
            .map(|d| (self.corpus_size as f64 / self.doc_frequencies[d] as f64).ln())
    }

    /// `tf · ln(|S| / df)` per in-vocabulary term.
    pub fn embed<T: AsRef<str>>(&self, tokens: &[T]) -> Vector {
        let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
        for token in tokens {
            if let Some(dim) = self.dimension(token.as_ref()) {
                *tf.entry(dim).or_default() += 1;
            }
        }
        Vector::from_weights(tf.into_iter().map(|(dim, count)| {
            let idf = (self.corpus_size as f64 / self.doc_frequencies[dim] as f64).ln();
            (dim, count as f64 * idf)
        }))
    }
}

impl Embedder for VectorIndex {
    fn embed_text(&self, text: &str) -> Vector {
        self.embed(&tokenize(text))
    }
}

pub fn build_index<D: AsRef<[String]>>(docs: &[D]) -> Result<VectorIndex, TextError> {
    VectorIndex::build(docs)
}

/// `f_{w,p} · ln(|S| / f_{w,S})`; 0 for out-of-vocabulary words.
pub fn tfidf_relevance<T: AsRef<str>>(word: &str, doc: &[T], index: &VectorIndex) -> f64 {
    let Some(idf) = index.idf(word) else {
        return 0.0;
    };
    let count = doc.iter().filter(|t| t.as_ref() == word).count();
    count as f64 * idf
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Keyword {
    pub term: String,
    pub score: f64,
}

fn rank(scores: HashMap<&str, f64>, k: usize) -> Vec<Keyword> {
    let mut ranked: Vec<Keyword> = scores
        .into_iter()
        .filter(|&(_, s)| s > 0.0)
        .map(|(term, score)| Keyword {
            term: term.to_string(),
            score,
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.term.cmp(&b.term))
    });
    ranked.truncate(k);
    ranked
}

/// Top `k` terms of one document by TF-IDF relevance; ties sort by term.
pub fn top_keywords<T: AsRef<str>>(doc: &[T], index: &VectorIndex, k: usize) -> Vec<Keyword> {
    let mut scores = HashMap::new();
    for token in doc {
        let term = token.as_ref();
        scores
            .entry(term)
            .or_insert_with(|| tfidf_relevance(term, doc, index));
    }
    rank(scores, k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeywordContrast {
    pub grouped: Vec<Keyword>,
    pub ungrouped: Vec<Keyword>,
    pub grouped_only: Vec<String>,
    pub ungrouped_only: Vec<String>,
}

fn aggregate<'a, D: AsRef<[String]>>(docs: &'a [D], index: &VectorIndex) -> HashMap<&'a str, f64> {
    let mut scores: HashMap<&str, f64> = HashMap::new();
    for doc in docs {
        let doc = doc.as_ref();
        let distinct: BTreeMap<&str, ()> = doc.iter().map(|t| (t.as_str(), ())).collect();
        for term in distinct.into_keys() {
            *scores.entry(term).or_default() += tfidf_relevance(term, doc, index);
        }
    }
    scores
}

/// Ranks keywords of two document collections against a shared index over
/// their union, reporting each side's top `k` and the terms exclusive to it.
pub fn keyword_contrast<D: AsRef<[String]>>(
    grouped_docs: &[D],
    ungrouped_docs: &[D],
    k: usize,
) -> Result<KeywordContrast, TextError> {
    if grouped_docs.is_empty() || ungrouped_docs.is_empty() {
        return Err(TextError::EmptyCorpus);
    }
    let union: Vec<&[String]> = grouped_docs
        .iter()
        .chain(ungrouped_docs)
        .map(AsRef::as_ref)
        .collect();
    let index = VectorIndex::build(&union)?;
    let grouped = rank(aggregate(grouped_docs, &index), k);
    let ungrouped = rank(aggregate(ungrouped_docs, &index), k);
    let exclusive = |mine: &[Keyword], theirs: &[Keyword]| -> Vec<String> {
        let other: HashSet<&str> = theirs.iter().map(|kw| kw.term.as_str()).collect();
        mine.iter()
            .filter(|kw| !other.contains(kw.term.as_str()))
            .map(|kw| kw.term.clone())
            .collect()
    };
    Ok(KeywordContrast {
        grouped_only: exclusive(&grouped, &ungrouped),
        ungrouped_only: exclusive(&ungrouped, &grouped),
        grouped,
        ungrouped,
    })
}
