//! The shipped economic-news ontology, lexicon and rule set.

use crate::extract::{LexicalEntry, PatternRule};
use crate::kbase::{KnowledgeBase, LayerDoc, LayerId};

pub const UPPER_JSON: &str = include_str!("../data/ontology/upper.json");
pub const DOMAIN_JSON: &str = include_str!("../data/ontology/domain.json");
pub const LEXICAL_JSON: &str = include_str!("../data/ontology/lexical.json");
pub const CORPUS_JSON: &str = include_str!("../data/ontology/corpus.json");
pub const LEXICON_JSON: &str = include_str!("../data/lexicon.json");
pub const RULES_JSON: &str = include_str!("../data/rules.json");

pub fn layer_json(layer: LayerId) -> &'static str {
    match layer {
        LayerId::Upper => UPPER_JSON,
        LayerId::Domain => DOMAIN_JSON,
        LayerId::Lexical => LEXICAL_JSON,
        LayerId::Corpus => CORPUS_JSON,
    }
}

pub fn layers() -> Vec<LayerDoc> {
    LayerId::ALL
        .iter()
        .map(|l| LayerDoc::from_json(layer_json(*l)).expect("shipped layer parses"))
        .collect()
}

pub fn knowledge_base() -> KnowledgeBase {
    KnowledgeBase::from_layers(&layers()).expect("shipped ontology is consistent")
}

pub fn lexicon() -> Vec<LexicalEntry> {
    serde_json::from_str(LEXICON_JSON).expect("shipped lexicon parses")
}

pub fn rules() -> Vec<PatternRule> {
    serde_json::from_str(RULES_JSON).expect("shipped rules parse")
}
