//! Concept-vector indexing: hierarchy-aware concept counts, TF-IDF
//! weighting, an inverted index with cosine ranking, and the plain
//! keyword-vector baseline.

mod corpus;
mod counts;
mod vector;

use std::collections::BTreeMap;

use thiserror::Error;

pub use corpus::{rank, tfidf, CorpusIndex, DocStats, KeywordIndex, TermIndex, WithPending};
pub use counts::{keyword_counts, raw_counts, Expansion};
pub use vector::{cosine, round_significant, ConceptVector, KeywordVector, SparseVector};

use crate::extract::Document;
use crate::kbase::KbError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("the corpus is empty")]
    EmptyCorpus,
    #[error("document `{0}` is already indexed")]
    DuplicateDoc(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error(transparent)]
    Kb(#[from] KbError),
}

/// Keyword vector of a document, weighted against a keyword index.
pub fn keyword_vector(index: &KeywordIndex, doc: &Document) -> Result<KeywordVector, IndexError> {
    let counts: BTreeMap<String, f64> = keyword_counts(doc);
    tfidf(index, &counts)
}

#[cfg(test)]
mod tests;
