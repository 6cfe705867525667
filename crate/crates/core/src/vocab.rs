//! Well-known ids the pipeline relies on. The shipped ontology defines all
//! of them; a replacement domain layer must keep `COMPANY` if the built-in
//! company rule is used.

pub const ENTITY: &str = "upper:Entity";
pub const TEMPORAL: &str = "upper:Temporal";
pub const COMPANY: &str = "domain:Company";
pub const ARTICLE: &str = "corpus:Article";
pub const MENTIONS: &str = "corpus:mentions";
pub const PUBLISHED_ON: &str = "corpus:publishedOn";

/// Corpus-layer individual standing for an article. The prefix keeps it
/// apart from corpus concept ids.
pub fn article_individual(doc_id: &str) -> String {
    format!("corpus:article-{doc_id}")
}
