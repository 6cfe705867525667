//! JSON exchange format: one document per layer. Struct fields are
//! declared in lexicographic order so serialized keys come out sorted.

use serde::{Deserialize, Serialize};

use super::validate::{Rule, Violation};
use super::{
    Assertion, AssertionRecord, Concept, Datatype, Individual, KnowledgeBase, LayerId, Object,
    PropertyDef, Range,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerDoc {
    #[serde(default)]
    pub assertions: Vec<AssertionDoc>,
    #[serde(default)]
    pub concepts: Vec<ConceptDoc>,
    #[serde(default)]
    pub individuals: Vec<IndividualDoc>,
    pub layer: LayerId,
    #[serde(default)]
    pub properties: Vec<PropertyDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptDoc {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub parents: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyDoc {
    pub domain: String,
    pub id: String,
    /// A concept id, or one of the datatype names `string`, `date`, `integer`.
    pub range: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndividualDoc {
    pub id: String,
    pub label: String,
    pub types: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionDoc {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub invalid: bool,
    pub object: ObjectDoc,
    pub property: String,
    pub subject: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectDoc {
    Id { id: String },
    Literal { datatype: Datatype, literal: String },
}

impl LayerDoc {
    pub fn empty(layer: LayerId) -> Self {
        LayerDoc {
            assertions: Vec::new(),
            concepts: Vec::new(),
            individuals: Vec::new(),
            layer,
            properties: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Deterministic pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layer documents always serialize")
    }
}

impl From<&Assertion> for AssertionDoc {
    fn from(a: &Assertion) -> Self {
        AssertionDoc {
            invalid: false,
            object: match &a.object {
                Object::Individual(id) => ObjectDoc::Id { id: id.to_string() },
                Object::Literal { value, datatype } => ObjectDoc::Literal {
                    datatype: *datatype,
                    literal: value.clone(),
                },
            },
            property: a.property.to_string(),
            subject: a.subject.to_string(),
        }
    }
}

impl From<&AssertionDoc> for Assertion {
    fn from(d: &AssertionDoc) -> Self {
        Assertion {
            subject: d.subject.as_str().into(),
            property: d.property.as_str().into(),
            object: match &d.object {
                ObjectDoc::Id { id } => Object::Individual(id.as_str().into()),
                ObjectDoc::Literal { datatype, literal } => Object::Literal {
                    value: literal.clone(),
                    datatype: *datatype,
                },
            },
        }
    }
}

fn parse_range(range: &str) -> Range {
    match Datatype::parse(range) {
        Some(dt) => Range::Datatype(dt),
        None => Range::Concept(range.into()),
    }
}

fn range_name(range: &Range) -> String {
    match range {
        Range::Concept(c) => c.to_string(),
        Range::Datatype(dt) => dt.name().to_owned(),
    }
}

impl KnowledgeBase {
    /// Insert a layer document without any consistency checks besides id
    /// uniqueness. Callers validate the result as a whole.
    pub(crate) fn insert_layer_raw(&mut self, doc: &LayerDoc, violations: &mut Vec<Violation>) {
        let layer = doc.layer;
        for c in &doc.concepts {
            if self.concepts.contains_key(c.id.as_str()) {
                violations.push(Violation::new(Rule::DuplicateId, &c.id, "concept id already in use"));
                continue;
            }
            self.concepts.insert(
                c.id.as_str().into(),
                Concept {
                    id: c.id.as_str().into(),
                    label: c.label.clone(),
                    layer,
                    parents: c.parents.iter().map(|p| p.as_str().into()).collect(),
                },
            );
        }
        for p in &doc.properties {
            if self.properties.contains_key(p.id.as_str()) {
                violations.push(Violation::new(Rule::DuplicateId, &p.id, "property id already in use"));
                continue;
            }
            self.properties.insert(
                p.id.as_str().into(),
                PropertyDef {
                    id: p.id.as_str().into(),
                    domain: p.domain.as_str().into(),
                    range: parse_range(&p.range),
                    layer,
                },
            );
        }
        for i in &doc.individuals {
            if self.individuals.contains_key(i.id.as_str()) {
                violations.push(Violation::new(Rule::DuplicateId, &i.id, "individual id already in use"));
                continue;
            }
            let mut types: Vec<_> = i.types.iter().map(|t| t.as_str().into()).collect();
            super::dedup_in_order(&mut types);
            self.individuals.insert(
                i.id.as_str().into(),
                Individual {
                    id: i.id.as_str().into(),
                    label: i.label.clone(),
                    types,
                    layer,
                },
            );
        }
        for a in &doc.assertions {
            self.assertions.push(AssertionRecord {
                assertion: a.into(),
                flagged: a.invalid,
            });
        }
    }

    /// Export one layer. Assertions travel with the layer of their subject.
    pub fn layer_doc(&self, layer: LayerId) -> LayerDoc {
        let concepts = self
            .concepts
            .values()
            .filter(|c| c.layer == layer)
            .map(|c| ConceptDoc {
                id: c.id.to_string(),
                label: c.label.clone(),
                parents: c.parents.iter().map(|p| p.to_string()).collect(),
            })
            .collect();
        let properties = self
            .properties
            .values()
            .filter(|p| p.layer == layer)
            .map(|p| PropertyDoc {
                domain: p.domain.to_string(),
                id: p.id.to_string(),
                range: range_name(&p.range),
            })
            .collect();
        let individuals = self
            .individuals
            .values()
            .filter(|i| i.layer == layer)
            .map(|i| IndividualDoc {
                id: i.id.to_string(),
                label: i.label.clone(),
                types: i.types.iter().map(|t| t.to_string()).collect(),
            })
            .collect();
        let assertions = self
            .assertions
            .iter()
            .filter(|r| {
                self.individuals
                    .get(&r.assertion.subject)
                    .map_or(layer == LayerId::Corpus, |s| s.layer == layer)
            })
            .map(|r| AssertionDoc {
                invalid: r.flagged,
                ..AssertionDoc::from(&r.assertion)
            })
            .collect();
        LayerDoc {
            assertions,
            concepts,
            individuals,
            layer,
            properties,
        }
    }
}
