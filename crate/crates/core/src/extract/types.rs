use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::kbase::{ConceptId, IndividualId};

/// A news article as supplied by the librarians.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Document {
    pub id: String,
    pub title: String,
    pub body: String,
    pub published_date: NaiveDate,
}

impl Document {
    /// The text annotations are anchored in: title, newline, body.
    pub fn full_text(&self) -> String {
        format!("{}\n{}", self.title, self.body)
    }
}

/// Half-open character span, serialized as `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl From<[usize; 2]> for Span {
    fn from([start, end]: [usize; 2]) -> Self {
        Span { start, end }
    }
}

impl From<Span> for [usize; 2] {
    fn from(s: Span) -> Self {
        [s.start, s.end]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Gazetteer,
    Pattern,
}

/// Stand-off annotation linking a text span to a concept and, when known,
/// to an individual.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotation {
    pub doc_id: String,
    pub span: Span,
    pub concept: ConceptId,
    pub individual: Option<IndividualId>,
    pub source: Source,
    pub rule_name: Option<String>,
    pub normalized_value: Option<String>,
}

impl Annotation {
    /// Id used when an annotation has to be named on its own, e.g. in a
    /// dangling-reference report: `<docId>#<position>`.
    pub fn ref_id(doc_id: &str, position: usize) -> String {
        format!("{doc_id}#{position}")
    }
}

/// Match priority. Gazetteer matches outrank every pattern rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Priority {
    Rule(i64),
    Gazetteer,
}

/// An annotation before overlap resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub annotation: Annotation,
    pub priority: Priority,
}
