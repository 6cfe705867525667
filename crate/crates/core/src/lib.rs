//! Ontology-driven recommendation of news articles.
//!
//! Articles are annotated against a four-layer knowledge base, indexed as
//! TF-IDF weighted concept vectors, and matched by cosine similarity
//! against per-user concept profiles that evolve with reader feedback.

pub mod extract;
pub mod fixtures;
pub mod index;
pub mod kbase;
pub mod profile;
pub mod recommend;
pub mod vocab;
