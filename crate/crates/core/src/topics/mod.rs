//! LDA topic modeling of group descriptions with UMass coherence and
//! coherence-driven choice of the topic count.

mod coherence;
mod lda;
mod report;

use thiserror::Error;

pub use coherence::{coherence, select_topic_count, top_words, KScore, TopicScan};
pub use lda::{fit_lda, LdaSettings, TopicModel};
pub use report::{
    group_documents, topic_report, TopicOverlap, TopicReport, TopicSummary, WordWeight,
};

#[derive(Debug, Error, PartialEq)]
pub enum TopicError {
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("invalid hyperparameter: {0}")]
    BadHyperparam(String),
}
