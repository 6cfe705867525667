use regex::Regex;
use serde::{Deserialize, Serialize};

use super::date::normalize_date;
use super::tokenize::{Token, TokenKind};
use super::types::{Annotation, Candidate, Priority, Source, Span};
use super::ExtractError;
use crate::kbase::{ConceptId, KnowledgeBase};
use crate::vocab;

/// One step of a token pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Matcher {
    /// Exact token text.
    Literal(String),
    /// Token class.
    Kind(TokenKind),
    /// Regular expression that must match the whole token text.
    Regex(String),
    /// A group of plain matchers that may be skipped as a whole.
    Optional(Vec<Matcher>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalizer {
    #[default]
    None,
    Date,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Action {
    pub concept: ConceptId,
    #[serde(default)]
    pub create_individual: bool,
    #[serde(default)]
    pub normalizer: Normalizer,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRule {
    pub name: String,
    pub priority: i64,
    pub pattern: Vec<Matcher>,
    pub action: Action,
}

#[derive(Debug, Clone)]
enum Atom {
    Literal(String),
    Kind(TokenKind),
    Regex(Regex),
}

impl Atom {
    fn accepts(&self, token: &Token) -> bool {
        match self {
            Atom::Literal(s) => token.text == *s,
            Atom::Kind(k) => token.kind == *k,
            Atom::Regex(re) => re.is_match(&token.text),
        }
    }
}

#[derive(Debug, Clone)]
enum Step {
    One(Atom),
    Optional(Vec<Atom>),
}

#[derive(Debug, Clone)]
struct CompiledRule {
    rule: PatternRule,
    steps: Vec<Step>,
}

/// A validated, compiled rule set. Each rule runs as a small finite-state
/// machine over the token stream; at every start position the longest
/// match of each rule is reported.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<CompiledRule>,
}

fn compile_atom(rule: &str, m: &Matcher) -> Result<Atom, ExtractError> {
    match m {
        Matcher::Literal(s) => Ok(Atom::Literal(s.clone())),
        Matcher::Kind(k) => Ok(Atom::Kind(*k)),
        Matcher::Regex(src) => Regex::new(&format!("^(?:{src})$"))
            .map(Atom::Regex)
            .map_err(|e| ExtractError::BadRegex {
                rule: rule.to_owned(),
                message: e.to_string(),
            }),
        Matcher::Optional(_) => Err(ExtractError::NestedOptional(rule.to_owned())),
    }
}

impl RuleSet {
    pub fn compile(rules: &[PatternRule], kb: &KnowledgeBase) -> Result<Self, ExtractError> {
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in rules {
            if kb.concept(rule.action.concept.as_str()).is_none() {
                return Err(ExtractError::UnknownConcept {
                    rule: rule.name.clone(),
                    concept: rule.action.concept.to_string(),
                });
            }
            let mut steps = Vec::with_capacity(rule.pattern.len());
            for m in &rule.pattern {
                steps.push(match m {
                    Matcher::Optional(group) => {
                        if group.is_empty() {
                            return Err(ExtractError::EmptyPattern(rule.name.clone()));
                        }
                        Step::Optional(
                            group
                                .iter()
                                .map(|g| compile_atom(&rule.name, g))
                                .collect::<Result<_, _>>()?,
                        )
                    }
                    other => Step::One(compile_atom(&rule.name, other)?),
                });
            }
            if !steps.iter().any(|s| matches!(s, Step::One(_))) {
                return Err(ExtractError::EmptyPattern(rule.name.clone()));
            }
            compiled.push(CompiledRule {
                rule: rule.clone(),
                steps,
            });
        }
        Ok(RuleSet { rules: compiled })
    }

    pub fn rules(&self) -> impl Iterator<Item = &PatternRule> {
        self.rules.iter().map(|r| &r.rule)
    }

    pub fn get(&self, name: &str) -> Option<&PatternRule> {
        self.rules().find(|r| r.name == name)
    }

    pub fn find(&self, doc_id: &str, tokens: &[Token]) -> Vec<Candidate> {
        let mut out = Vec::new();
        for start in 0..tokens.len() {
            for cr in &self.rules {
                let Some(end) = longest_match(&cr.steps, tokens, start) else {
                    continue;
                };
                let matched = &tokens[start..end];
                let normalized_value = match cr.rule.action.normalizer {
                    Normalizer::None => None,
                    Normalizer::Date => match normalize_date(matched) {
                        Some((v, _)) => Some(v),
                        None => continue,
                    },
                };
                out.push(Candidate {
                    annotation: Annotation {
                        doc_id: doc_id.to_owned(),
                        span: Span::new(matched[0].start, matched[matched.len() - 1].end),
                        concept: cr.rule.action.concept.clone(),
                        individual: None,
                        source: Source::Pattern,
                        rule_name: Some(cr.rule.name.clone()),
                        normalized_value,
                    },
                    priority: Priority::Rule(cr.rule.priority),
                });
            }
        }
        out
    }
}

/// Simulate the rule's automaton from `start`; returns the furthest
/// non-empty match end.
fn longest_match(steps: &[Step], tokens: &[Token], start: usize) -> Option<usize> {
    let advance = |positions: &[usize], atom: &Atom| -> Vec<usize> {
        positions
            .iter()
            .filter(|&&p| p < tokens.len() && atom.accepts(&tokens[p]))
            .map(|&p| p + 1)
            .collect()
    };
    let mut positions = vec![start];
    for step in steps {
        positions = match step {
            Step::One(atom) => advance(&positions, atom),
            Step::Optional(group) => {
                let mut through = positions.clone();
                for atom in group {
                    through = advance(&through, atom);
                }
                positions.extend(through);
                positions.sort_unstable();
                positions.dedup();
                positions
            }
        };
        if positions.is_empty() {
            return None;
        }
    }
    positions.into_iter().max().filter(|&end| end > start)
}

pub fn pattern_match(
    doc_id: &str,
    tokens: &[Token],
    rules: &[PatternRule],
    kb: &KnowledgeBase,
) -> Result<Vec<Annotation>, ExtractError> {
    let set = RuleSet::compile(rules, kb)?;
    Ok(set.find(doc_id, tokens).into_iter().map(|c| c.annotation).collect())
}

const MONTH_REGEX: &str = "(?i)janvier|f[ée]vrier|mars|avril|mai|juin|juillet|ao[uû]t|septembre|octobre|novembre|d[ée]cembre";

/// French calendar dates: `12 janvier 2011`, `1er août 2012`, `janvier 2011`.
pub fn french_date_rule() -> PatternRule {
    PatternRule {
        name: "fr-date".into(),
        priority: 10,
        pattern: vec![
            Matcher::Optional(vec![Matcher::Regex("[0-9]{1,2}".into())]),
            Matcher::Optional(vec![Matcher::Literal("er".into())]),
            Matcher::Regex(MONTH_REGEX.into()),
            Matcher::Regex("[0-9]{4}".into()),
        ],
        action: Action {
            concept: vocab::TEMPORAL.into(),
            create_individual: false,
            normalizer: Normalizer::Date,
        },
    }
}

/// Capitalized name followed by a French company-form suffix,
/// e.g. `Nexidia SARL`, `Bourgogne Bio SAS`.
pub fn company_suffix_rule() -> PatternRule {
    PatternRule {
        name: "company-suffix".into(),
        priority: 5,
        pattern: vec![
            Matcher::Regex(r"\p{Lu}\p{L}*".into()),
            Matcher::Optional(vec![Matcher::Regex(r"\p{Lu}\p{L}*".into())]),
            Matcher::Regex("SARL|SAS|SA|SNC|EURL".into()),
        ],
        action: Action {
            concept: vocab::COMPANY.into(),
            create_individual: true,
            normalizer: Normalizer::None,
        },
    }
}

/// The shipped rule inventory.
pub fn builtin_rules() -> Vec<PatternRule> {
    vec![french_date_rule(), company_suffix_rule()]
}
