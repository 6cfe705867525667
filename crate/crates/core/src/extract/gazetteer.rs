use std::cmp::Reverse;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::tokenize::{fold, tokenize, Token};
use super::types::{Annotation, Candidate, Priority, Source, Span};
use super::ExtractError;
use crate::kbase::{ConceptId, IndividualId, KnowledgeBase};

/// Lexical-layer entry mapping a surface form to a concept or individual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LexicalEntry {
    pub surface: String,
    pub target: String,
    #[serde(default)]
    pub case_sensitive: bool,
}

impl LexicalEntry {
    pub fn new(surface: impl Into<String>, target: impl Into<String>) -> Self {
        LexicalEntry {
            surface: surface.into(),
            target: target.into(),
            case_sensitive: false,
        }
    }

    pub fn case_sensitive(mut self) -> Self {
        self.case_sensitive = true;
        self
    }

    /// Id used in dangling-reference reports: `lexicon#<position>`.
    pub fn ref_id(position: usize) -> String {
        format!("lexicon#{position}")
    }
}

#[derive(Default, Debug, Clone)]
struct Node {
    next: HashMap<String, usize>,
    /// Lowest lexicon position of an entry ending here.
    terminal: Option<usize>,
}

#[derive(Debug, Clone)]
struct Trie {
    nodes: Vec<Node>,
}

impl Trie {
    fn new() -> Self {
        Trie {
            nodes: vec![Node::default()],
        }
    }

    fn insert(&mut self, keys: &[String], entry: usize) {
        let mut cur = 0;
        for key in keys {
            cur = match self.nodes[cur].next.get(key) {
                Some(&n) => n,
                None => {
                    self.nodes.push(Node::default());
                    let n = self.nodes.len() - 1;
                    self.nodes[cur].next.insert(key.clone(), n);
                    n
                }
            };
        }
        let t = &mut self.nodes[cur].terminal;
        *t = Some(t.map_or(entry, |e| e.min(entry)));
    }

    /// Longest entry starting at `keys[0]`: (token count, lexicon position).
    fn longest<'a>(&self, keys: impl Iterator<Item = &'a str>) -> Option<(usize, usize)> {
        let mut cur = 0;
        let mut best = None;
        for (depth, key) in keys.enumerate() {
            match self.nodes[cur].next.get(key) {
                Some(&n) => cur = n,
                None => break,
            }
            if let Some(e) = self.nodes[cur].terminal {
                best = Some((depth + 1, e));
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
struct Target {
    concept: ConceptId,
    individual: Option<IndividualId>,
}

/// Token-level dictionary matcher compiled from a lexicon.
///
/// Matching is leftmost-longest over the token stream: scanning left to
/// right, the longest entry starting at the current token wins and the scan
/// resumes after it. Equal-length entries resolve to the earliest lexicon
/// position.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    exact: Trie,
    folded: Trie,
    targets: Vec<Target>,
}

impl Gazetteer {
    pub fn compile(lexicon: &[LexicalEntry], kb: &KnowledgeBase) -> Result<Self, ExtractError> {
        let mut exact = Trie::new();
        let mut folded = Trie::new();
        let mut targets = Vec::with_capacity(lexicon.len());
        for (pos, entry) in lexicon.iter().enumerate() {
            let target = resolve_target(kb, &entry.target)
                .ok_or_else(|| ExtractError::UnknownTarget(entry.target.clone()))?;
            let toks: Vec<String> = tokenize(&entry.surface).into_iter().map(|t| t.text).collect();
            if toks.is_empty() {
                return Err(ExtractError::EmptySurface(pos));
            }
            if entry.case_sensitive {
                exact.insert(&toks, pos);
            } else {
                let keys: Vec<String> = toks.iter().map(|t| fold(t)).collect();
                folded.insert(&keys, pos);
            }
            targets.push(target);
        }
        Ok(Gazetteer {
            exact,
            folded,
            targets,
        })
    }

    pub fn find(&self, doc_id: &str, tokens: &[Token]) -> Vec<Candidate> {
        let folded: Vec<String> = tokens.iter().map(|t| fold(&t.text)).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let a = self.exact.longest(tokens[i..].iter().map(|t| t.text.as_str()));
            let b = self.folded.longest(folded[i..].iter().map(String::as_str));
            let best = [a, b]
                .into_iter()
                .flatten()
                .min_by_key(|&(len, entry)| (Reverse(len), entry));
            match best {
                Some((len, entry)) => {
                    let target = &self.targets[entry];
                    out.push(Candidate {
                        annotation: Annotation {
                            doc_id: doc_id.to_owned(),
                            span: Span::new(tokens[i].start, tokens[i + len - 1].end),
                            concept: target.concept.clone(),
                            individual: target.individual.clone(),
                            source: Source::Gazetteer,
                            rule_name: None,
                            normalized_value: None,
                        },
                        priority: Priority::Gazetteer,
                    });
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}

fn resolve_target(kb: &KnowledgeBase, target: &str) -> Option<Target> {
    if let Some(c) = kb.concept(target) {
        return Some(Target {
            concept: c.id.clone(),
            individual: None,
        });
    }
    let ind = kb.individual(target)?;
    Some(Target {
        concept: ind.primary_type()?.clone(),
        individual: Some(ind.id.clone()),
    })
}

/// Convenience wrapper: compile and match in one go.
pub fn gazetteer_match(
    doc_id: &str,
    tokens: &[Token],
    lexicon: &[LexicalEntry],
    kb: &KnowledgeBase,
) -> Result<Vec<Annotation>, ExtractError> {
    let gaz = Gazetteer::compile(lexicon, kb)?;
    Ok(gaz.find(doc_id, tokens).into_iter().map(|c| c.annotation).collect())
}
