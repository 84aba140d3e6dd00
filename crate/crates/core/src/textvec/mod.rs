//! Tokenization, TF-IDF embedding, keyword ranking and edit distance.

mod edit;
mod tfidf;
mod tokenize;

use thiserror::Error;

pub use edit::edit_distance;
pub use tfidf::{
    build_index, cosine_similarity, keyword_contrast, tfidf_relevance, top_keywords, Embedder,
    Keyword, KeywordContrast, Vector, VectorIndex,
};
pub use tokenize::{stopwords, tokenize};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("corpus has no documents")]
    EmptyCorpus,
}
