use std::collections::BTreeMap;

use crate::extract::{tokenize, Annotation, Document, TokenKind};
use crate::kbase::{ConceptId, KnowledgeBase, LayerId};
use crate::vocab;

use super::IndexError;

/// Hierarchy expansion settings for concept counting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expansion {
    /// Weight factor per subclass step, in `(0, 1]`; 1 disables decay.
    pub decay: f64,
    pub enabled: bool,
}

impl Default for Expansion {
    fn default() -> Self {
        Expansion {
            decay: 0.5,
            enabled: true,
        }
    }
}

impl Expansion {
    pub fn off() -> Self {
        Expansion {
            decay: 1.0,
            enabled: false,
        }
    }

    pub fn with_decay(decay: f64) -> Self {
        Expansion {
            decay,
            enabled: true,
        }
    }
}

/// Concept counts for one article. Every annotation adds 1 to its concept
/// and `decay^d` to each strict ancestor at shortest distance `d`.
/// Only upper- and domain-layer concepts count; temporal annotations are
/// metadata and are skipped.
pub fn raw_counts(
    annotations: &[Annotation],
    kb: &KnowledgeBase,
    expansion: Expansion,
) -> Result<BTreeMap<ConceptId, f64>, IndexError> {
    let temporal = kb.concept(vocab::TEMPORAL).map(|c| c.id.clone());
    let mut counts: BTreeMap<ConceptId, f64> = BTreeMap::new();
    for ann in annotations {
        let concept = kb
            .concept(ann.concept.as_str())
            .ok_or_else(|| IndexError::UnknownConcept(ann.concept.to_string()))?;
        if !matches!(concept.layer, LayerId::Upper | LayerId::Domain) {
            continue;
        }
        if ann.normalized_value.is_some()
            || temporal.as_ref().is_some_and(|t| kb.subsumes(t, &concept.id))
        {
            continue;
        }
        if expansion.enabled {
            for (ancestor, d) in kb.ancestor_distances(concept.id.as_str())? {
                *counts.entry(ancestor).or_default() += expansion.decay.powi(d as i32);
            }
        } else {
            *counts.entry(concept.id.clone()).or_default() += 1.0;
        }
    }
    Ok(counts)
}

/// Lowercased word counts of title and body.
pub fn keyword_counts(doc: &Document) -> BTreeMap<String, f64> {
    let mut counts = BTreeMap::new();
    for t in tokenize(&doc.full_text()) {
        if t.kind == TokenKind::Word {
            *counts.entry(t.text.to_lowercase()).or_default() += 1.0;
        }
    }
    counts
}
