//! Ontology-based information extraction: tokenization, gazetteer lookup
//! against the lexical layer, finite-state token patterns, overlap
//! resolution and ABox population.

mod date;
mod gazetteer;
mod overlap;
mod pattern;
mod populate;
mod tokenize;
mod types;

use std::collections::BTreeMap;

use thiserror::Error;

pub use date::{month_number, normalize_date, Precision};
pub use gazetteer::{gazetteer_match, Gazetteer, LexicalEntry};
pub use overlap::{preference, resolve_overlaps};
pub use pattern::{
    builtin_rules, company_suffix_rule, french_date_rule, pattern_match, Action, Matcher,
    Normalizer, PatternRule, RuleSet,
};
pub use populate::{populate, Population};
pub use tokenize::{fold, normalize_surface, slice_chars, tokenize, Token, TokenKind};
pub use types::{Annotation, Candidate, Document, Priority, Source, Span};

use crate::kbase::{ExternalRef, KbError, KnowledgeBase, RefKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("lexicon target `{0}` is neither a concept nor an individual")]
    UnknownTarget(String),
    #[error("lexicon entry {0} has an empty surface")]
    EmptySurface(usize),
    #[error("rule `{0}` has no mandatory matcher")]
    EmptyPattern(String),
    #[error("rule `{rule}` annotates unknown concept `{concept}`")]
    UnknownConcept { rule: String, concept: String },
    #[error("rule `{rule}` has an invalid regex: {message}")]
    BadRegex { rule: String, message: String },
    #[error("rule `{0}` nests an optional group")]
    NestedOptional(String),
    #[error(transparent)]
    Kb(#[from] KbError),
}

/// Compiled gazetteer and rule set, ready to annotate documents.
#[derive(Debug, Clone)]
pub struct Extractor {
    pub gazetteer: Gazetteer,
    pub rules: RuleSet,
}

impl Extractor {
    pub fn new(
        kb: &KnowledgeBase,
        lexicon: &[LexicalEntry],
        rules: &[PatternRule],
    ) -> Result<Self, ExtractError> {
        Ok(Extractor {
            gazetteer: Gazetteer::compile(lexicon, kb)?,
            rules: RuleSet::compile(rules, kb)?,
        })
    }

    /// Annotate a document: gazetteer and pattern candidates over the
    /// tokenized title and body, with overlaps resolved.
    pub fn annotate(&self, doc: &Document) -> Vec<Annotation> {
        self.annotate_text(&doc.id, &doc.full_text())
    }

    pub fn annotate_text(&self, doc_id: &str, text: &str) -> Vec<Annotation> {
        let tokens = tokenize(text);
        let mut candidates = self.gazetteer.find(doc_id, &tokens);
        candidates.extend(self.rules.find(doc_id, &tokens));
        resolve_overlaps(candidates)
    }
}

pub fn annotate(
    doc: &Document,
    kb: &KnowledgeBase,
    lexicon: &[LexicalEntry],
    rules: &[PatternRule],
) -> Result<Vec<Annotation>, ExtractError> {
    Ok(Extractor::new(kb, lexicon, rules)?.annotate(doc))
}

/// Describe lexicon entries and stored annotations as references into the
/// knowledge base, for dangling-reference reports.
pub fn external_refs<'a>(
    lexicon: &[LexicalEntry],
    annotations: impl IntoIterator<Item = (&'a String, &'a Vec<Annotation>)>,
) -> Vec<ExternalRef> {
    let mut refs: Vec<ExternalRef> = lexicon
        .iter()
        .enumerate()
        .map(|(pos, e)| ExternalRef {
            kind: RefKind::LexicalEntry,
            id: LexicalEntry::ref_id(pos),
            targets: vec![e.target.clone()],
        })
        .collect();
    let by_doc: BTreeMap<&String, &Vec<Annotation>> = annotations.into_iter().collect();
    for (doc, anns) in by_doc {
        for (pos, a) in anns.iter().enumerate() {
            let mut targets = vec![a.concept.to_string()];
            targets.extend(a.individual.iter().map(|i| i.to_string()));
            refs.push(ExternalRef {
                kind: RefKind::Annotation,
                id: Annotation::ref_id(doc, pos),
                targets,
            });
        }
    }
    refs
}
