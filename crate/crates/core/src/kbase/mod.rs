//! Four-layer knowledge base: a TBox (named classes, subclass axioms,
//! property definitions) and an ABox (typed individuals, binary
//! assertions), partitioned into the upper, domain, lexical and corpus
//! layers.
//!
//! Only a restricted fragment is supported: class hierarchy, multi-typing
//! and property assertions. Mutations are atomic: an operation that returns
//! an error leaves the knowledge base untouched.

mod exchange;
mod ids;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exchange::{
    AssertionDoc, ConceptDoc, IndividualDoc, LayerDoc, ObjectDoc, PropertyDoc,
};
pub use ids::{ConceptId, IndividualId, PropertyId};
pub use validate::{Rule, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerId {
    Upper,
    Domain,
    Lexical,
    Corpus,
}

impl LayerId {
    pub const ALL: [LayerId; 4] = [
        LayerId::Upper,
        LayerId::Domain,
        LayerId::Lexical,
        LayerId::Corpus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LayerId::Upper => "upper",
            LayerId::Domain => "domain",
            LayerId::Lexical => "lexical",
            LayerId::Corpus => "corpus",
        }
    }

    pub fn parse(s: &str) -> Option<LayerId> {
        LayerId::ALL.into_iter().find(|l| l.name() == s)
    }

    /// Whether terminology in `self` may point at terminology in `target`.
    /// Every layer may build on the upper layer; otherwise references stay
    /// inside the layer.
    pub fn may_reference(self, target: LayerId) -> bool {
        self == target || target == LayerId::Upper
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Concept {
    pub id: ConceptId,
    pub label: String,
    pub layer: LayerId,
    pub parents: BTreeSet<ConceptId>,
}

impl Concept {
    pub fn new(id: impl Into<ConceptId>, label: impl Into<String>, layer: LayerId) -> Self {
        Concept {
            id: id.into(),
            label: label.into(),
            layer,
            parents: BTreeSet::new(),
        }
    }

    pub fn with_parent(mut self, parent: impl Into<ConceptId>) -> Self {
        self.parents.insert(parent.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Date,
    Integer,
}

impl Datatype {
    pub fn name(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Date => "date",
            Datatype::Integer => "integer",
        }
    }

    pub fn parse(s: &str) -> Option<Datatype> {
        match s {
            "string" => Some(Datatype::String),
            "date" => Some(Datatype::Date),
            "integer" => Some(Datatype::Integer),
            _ => None,
        }
    }

    pub fn accepts(self, lexical: &str) -> bool {
        match self {
            Datatype::String => true,
            Datatype::Date => NaiveDate::parse_from_str(lexical, "%Y-%m-%d").is_ok(),
            Datatype::Integer => lexical.parse::<i64>().is_ok(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Range {
    Concept(ConceptId),
    Datatype(Datatype),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyDef {
    pub id: PropertyId,
    pub domain: ConceptId,
    pub range: Range,
    pub layer: LayerId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub id: IndividualId,
    pub label: String,
    /// Asserted types in authoring order; the first one is the primary type.
    pub types: Vec<ConceptId>,
    pub layer: LayerId,
}

impl Individual {
    pub fn new(
        id: impl Into<IndividualId>,
        label: impl Into<String>,
        ty: impl Into<ConceptId>,
        layer: LayerId,
    ) -> Self {
        Individual {
            id: id.into(),
            label: label.into(),
            types: vec![ty.into()],
            layer,
        }
    }

    pub fn primary_type(&self) -> Option<&ConceptId> {
        self.types.first()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Object {
    Individual(IndividualId),
    Literal { value: String, datatype: Datatype },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assertion {
    pub subject: IndividualId,
    pub property: PropertyId,
    pub object: Object,
}

impl Assertion {
    pub fn link(
        subject: impl Into<IndividualId>,
        property: impl Into<PropertyId>,
        object: impl Into<IndividualId>,
    ) -> Self {
        Assertion {
            subject: subject.into(),
            property: property.into(),
            object: Object::Individual(object.into()),
        }
    }

    pub fn literal(
        subject: impl Into<IndividualId>,
        property: impl Into<PropertyId>,
        value: impl Into<String>,
        datatype: Datatype,
    ) -> Self {
        Assertion {
            subject: subject.into(),
            property: property.into(),
            object: Object::Literal {
                value: value.into(),
                datatype,
            },
        }
    }

    /// Stable textual key, used to name assertions in reports.
    pub fn key(&self) -> String {
        match &self.object {
            Object::Individual(o) => format!("{} {} {}", self.subject, self.property, o),
            Object::Literal { value, datatype } => {
                format!("{} {} {:?}^^{}", self.subject, self.property, value, datatype.name())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct AssertionRecord {
    pub(crate) assertion: Assertion,
    /// Set when a domain swap left the assertion pointing at removed ids.
    pub(crate) flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KbError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("concept `{concept}` names unknown parent `{parent}`")]
    UnknownParent { concept: String, parent: String },
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("layer violation on `{id}`: {detail}")]
    LayerViolation { id: String, detail: String },
    #[error("subclass axiom `{child}` ⊑ `{parent}` would create a cycle")]
    CycleDetected { child: String, parent: String },
    #[error("`{subject}` is not typed under the domain of `{property}`")]
    DomainViolation { subject: String, property: String },
    #[error("range violation on `{property}`: {detail}")]
    RangeViolation { property: String, detail: String },
    #[error("individual `{0}` has no types")]
    EmptyTypes(String),
    #[error("invalid {layer} layer: {} violation(s)", violations.len())]
    InvalidLayer {
        layer: LayerId,
        violations: Vec<Violation>,
    },
    #[error("invalid domain layer: {} violation(s)", .0.len())]
    InvalidDomainLayer(Vec<Violation>),
}

pub type Result<T, E = KbError> = std::result::Result<T, E>;

/// Something outside the knowledge base that points into it: a lexicon
/// entry or a stored annotation. Used to compute dangling references after
/// a domain swap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalRef {
    pub kind: RefKind,
    pub id: String,
    pub targets: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefKind {
    LexicalEntry,
    Annotation,
}

/// References left pointing at ids that a domain swap removed. Nothing is
/// deleted; the listed items are only flagged.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DanglingReport {
    pub lexical_entries: Vec<String>,
    pub annotations: Vec<String>,
    pub assertions: Vec<String>,
    pub removed_ids: Vec<String>,
}

impl DanglingReport {
    pub fn is_empty(&self) -> bool {
        self.lexical_entries.is_empty() && self.annotations.is_empty() && self.assertions.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KnowledgeBase {
    pub(crate) concepts: BTreeMap<ConceptId, Concept>,
    pub(crate) properties: BTreeMap<PropertyId, PropertyDef>,
    pub(crate) individuals: BTreeMap<IndividualId, Individual>,
    pub(crate) assertions: Vec<AssertionRecord>,
    pub(crate) version: u64,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn property(&self, id: &str) -> Option<&PropertyDef> {
        self.properties.get(id)
    }

    pub fn individual(&self, id: &str) -> Option<&Individual> {
        self.individuals.get(id)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.values()
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.values()
    }

    /// Assertions that are currently valid (not flagged by a domain swap).
    pub fn assertions(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions
            .iter()
            .filter(|r| !r.flagged)
            .map(|r| &r.assertion)
    }

    pub fn flagged_assertions(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions
            .iter()
            .filter(|r| r.flagged)
            .map(|r| &r.assertion)
    }

    pub fn add_concept(&mut self, concept: Concept) -> Result<()> {
        if self.concepts.contains_key(&concept.id) {
            return Err(KbError::DuplicateId(concept.id.to_string()));
        }
        for parent in &concept.parents {
            let Some(p) = self.concepts.get(parent) else {
                return Err(KbError::UnknownParent {
                    concept: concept.id.to_string(),
                    parent: parent.to_string(),
                });
            };
            if !concept.layer.may_reference(p.layer) {
                return Err(KbError::LayerViolation {
                    id: concept.id.to_string(),
                    detail: format!("{} concept under {} parent `{}`", concept.layer, p.layer, p.id),
                });
            }
        }
        self.concepts.insert(concept.id.clone(), concept);
        self.version += 1;
        Ok(())
    }

    pub fn add_subclass_axiom(&mut self, child: &str, parent: &str) -> Result<()> {
        let c = self
            .concepts
            .get(child)
            .ok_or_else(|| KbError::UnknownId(child.to_owned()))?;
        let p = self
            .concepts
            .get(parent)
            .ok_or_else(|| KbError::UnknownId(parent.to_owned()))?;
        if child == parent || self.ancestors(parent)?.contains(child) {
            return Err(KbError::CycleDetected {
                child: child.to_owned(),
                parent: parent.to_owned(),
            });
        }
        if !c.layer.may_reference(p.layer) {
            return Err(KbError::LayerViolation {
                id: child.to_owned(),
                detail: format!("{} concept under {} parent `{}`", c.layer, p.layer, parent),
            });
        }
        let parent_id = p.id.clone();
        let inserted = self
            .concepts
            .get_mut(child)
            .expect("checked above")
            .parents
            .insert(parent_id);
        if inserted {
            self.version += 1;
        }
        Ok(())
    }

    pub fn add_property(&mut self, property: PropertyDef) -> Result<()> {
        if self.properties.contains_key(&property.id) {
            return Err(KbError::DuplicateId(property.id.to_string()));
        }
        let mut referenced = vec![&property.domain];
        if let Range::Concept(r) = &property.range {
            referenced.push(r);
        }
        for id in referenced {
            let c = self
                .concepts
                .get(id)
                .ok_or_else(|| KbError::UnknownId(id.to_string()))?;
            if !property.layer.may_reference(c.layer) {
                return Err(KbError::LayerViolation {
                    id: property.id.to_string(),
                    detail: format!("{} property refers to {} concept `{}`", property.layer, c.layer, id),
                });
            }
        }
        self.properties.insert(property.id.clone(), property);
        self.version += 1;
        Ok(())
    }

    pub fn add_individual(&mut self, individual: Individual) -> Result<()> {
        if self.individuals.contains_key(&individual.id) {
            return Err(KbError::DuplicateId(individual.id.to_string()));
        }
        if individual.types.is_empty() {
            return Err(KbError::EmptyTypes(individual.id.to_string()));
        }
        for ty in &individual.types {
            let c = self
                .concepts
                .get(ty)
                .ok_or_else(|| KbError::UnknownId(ty.to_string()))?;
            if !individual.layer.may_reference(c.layer) {
                return Err(KbError::LayerViolation {
                    id: individual.id.to_string(),
                    detail: format!("{} individual typed by {} concept `{}`", individual.layer, c.layer, ty),
                });
            }
        }
        let mut individual = individual;
        dedup_in_order(&mut individual.types);
        self.individuals.insert(individual.id.clone(), individual);
        self.version += 1;
        Ok(())
    }

    pub fn assert_relation(&mut self, assertion: Assertion) -> Result<()> {
        self.check_assertion(&assertion)?;
        self.assertions.push(AssertionRecord {
            assertion,
            flagged: false,
        });
        self.version += 1;
        Ok(())
    }

    pub(crate) fn check_assertion(&self, a: &Assertion) -> Result<()> {
        let subject = self
            .individuals
            .get(&a.subject)
            .ok_or_else(|| KbError::UnknownId(a.subject.to_string()))?;
        let property = self
            .properties
            .get(&a.property)
            .ok_or_else(|| KbError::UnknownId(a.property.to_string()))?;
        if !self.is_typed_under(subject, &property.domain) {
            return Err(KbError::DomainViolation {
                subject: a.subject.to_string(),
                property: a.property.to_string(),
            });
        }
        match (&property.range, &a.object) {
            (Range::Concept(range), Object::Individual(o)) => {
                let object = self
                    .individuals
                    .get(o)
                    .ok_or_else(|| KbError::UnknownId(o.to_string()))?;
                if !self.is_typed_under(object, range) {
                    return Err(KbError::RangeViolation {
                        property: a.property.to_string(),
                        detail: format!("`{o}` is not an instance of `{range}`"),
                    });
                }
            }
            (Range::Concept(range), Object::Literal { .. }) => {
                return Err(KbError::RangeViolation {
                    property: a.property.to_string(),
                    detail: format!("literal given where an instance of `{range}` is expected"),
                });
            }
            (Range::Datatype(dt), Object::Literal { value, datatype }) => {
                if dt != datatype || !dt.accepts(value) {
                    return Err(KbError::RangeViolation {
                        property: a.property.to_string(),
                        detail: format!(
                            "literal {:?}^^{} does not match datatype {}",
                            value,
                            datatype.name(),
                            dt.name()
                        ),
                    });
                }
            }
            (Range::Datatype(dt), Object::Individual(o)) => {
                return Err(KbError::RangeViolation {
                    property: a.property.to_string(),
                    detail: format!("individual `{o}` given where a {} literal is expected", dt.name()),
                });
            }
        }
        Ok(())
    }

    /// Whether one of the individual's types is a descendant-or-self of `concept`.
    pub fn is_typed_under(&self, individual: &Individual, concept: &ConceptId) -> bool {
        individual
            .types
            .iter()
            .any(|t| self.subsumes(concept, t))
    }

    /// `general` is an ancestor-or-self of `specific`.
    pub fn subsumes(&self, general: &ConceptId, specific: &ConceptId) -> bool {
        if general == specific {
            return true;
        }
        self.upward_distances(specific).contains_key(general)
    }

    /// Reflexive-transitive closure of the subclass relation from `id`.
    pub fn ancestors(&self, id: &str) -> Result<BTreeSet<ConceptId>> {
        Ok(self.ancestor_distances(id)?.into_keys().collect())
    }

    /// Ancestors-or-self with their shortest subclass-path distance.
    pub fn ancestor_distances(&self, id: &str) -> Result<BTreeMap<ConceptId, usize>> {
        let c = self
            .concepts
            .get(id)
            .ok_or_else(|| KbError::UnknownId(id.to_owned()))?;
        Ok(self.upward_distances(&c.id))
    }

    fn upward_distances(&self, start: &ConceptId) -> BTreeMap<ConceptId, usize> {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::new();
        dist.insert(start.clone(), 0);
        queue.push_back(start.clone());
        while let Some(cur) = queue.pop_front() {
            let d = dist[&cur];
            let Some(concept) = self.concepts.get(&cur) else {
                continue;
            };
            for p in &concept.parents {
                if !dist.contains_key(p) {
                    dist.insert(p.clone(), d + 1);
                    queue.push_back(p.clone());
                }
            }
        }
        dist
    }

    /// Descendants-or-self of `id`.
    pub fn descendants(&self, id: &str) -> Result<BTreeSet<ConceptId>> {
        let c = self
            .concepts
            .get(id)
            .ok_or_else(|| KbError::UnknownId(id.to_owned()))?;
        let children = self.children_map();
        let mut seen = BTreeSet::from([c.id.clone()]);
        let mut stack = vec![&c.id];
        while let Some(cur) = stack.pop() {
            for child in children.get(cur).into_iter().flatten() {
                if seen.insert((*child).clone()) {
                    stack.push(child);
                }
            }
        }
        Ok(seen)
    }

    fn children_map(&self) -> BTreeMap<&ConceptId, Vec<&ConceptId>> {
        let mut children: BTreeMap<&ConceptId, Vec<&ConceptId>> = BTreeMap::new();
        for c in self.concepts.values() {
            for p in &c.parents {
                children.entry(p).or_default().push(&c.id);
            }
        }
        children
    }

    /// Individuals typed `id` directly, or (when `inferred`) by any of its
    /// descendants-or-self.
    pub fn instances_of(&self, id: &str, inferred: bool) -> Result<BTreeSet<IndividualId>> {
        let targets = if inferred {
            self.descendants(id)?
        } else {
            let c = self
                .concepts
                .get(id)
                .ok_or_else(|| KbError::UnknownId(id.to_owned()))?;
            BTreeSet::from([c.id.clone()])
        };
        Ok(self
            .individuals
            .values()
            .filter(|i| i.types.iter().any(|t| targets.contains(t)))
            .map(|i| i.id.clone())
            .collect())
    }

    /// Replace the domain layer atomically. Upper, lexical and corpus
    /// content is left as is; every reference into the removed part is
    /// reported (and assertions are flagged), never deleted.
    pub fn swap_domain_ontology(
        &mut self,
        new_domain: &LayerDoc,
        external: &[ExternalRef],
    ) -> Result<DanglingReport> {
        if new_domain.layer != LayerId::Domain {
            return Err(KbError::InvalidDomainLayer(vec![Violation::new(
                Rule::LayerViolation,
                new_domain.layer.name(),
                "replacement document is not a domain layer",
            )]));
        }
        let old_ids = self.layer_ids(LayerId::Domain);

        let mut next = self.clone();
        next.concepts.retain(|_, c| c.layer != LayerId::Domain);
        next.properties.retain(|_, p| p.layer != LayerId::Domain);
        let old_individuals = std::mem::take(&mut next.individuals);
        let (domain_inds, kept): (BTreeMap<_, _>, BTreeMap<_, _>) = old_individuals
            .into_iter()
            .partition(|(_, i)| i.layer == LayerId::Domain);
        next.individuals = kept;
        next.assertions
            .retain(|r| !domain_inds.contains_key(&r.assertion.subject));

        let mut clashes = Vec::new();
        next.insert_layer_raw(new_domain, &mut clashes);
        if !clashes.is_empty() {
            return Err(KbError::InvalidDomainLayer(clashes));
        }

        let mut report = DanglingReport::default();
        for i in 0..next.assertions.len() {
            let ok = next.check_assertion(&next.assertions[i].assertion).is_ok();
            let record = &mut next.assertions[i];
            if !ok {
                record.flagged = true;
                report.assertions.push(record.assertion.key());
            }
        }

        let violations = next.validate();
        if !violations.is_empty() {
            return Err(KbError::InvalidDomainLayer(violations));
        }

        let new_ids = next.layer_ids(LayerId::Domain);
        let removed: BTreeSet<&String> = old_ids.difference(&new_ids).collect();
        for r in external {
            if r.targets.iter().any(|t| removed.contains(t)) {
                match r.kind {
                    RefKind::LexicalEntry => report.lexical_entries.push(r.id.clone()),
                    RefKind::Annotation => report.annotations.push(r.id.clone()),
                }
            }
        }
        report.removed_ids = removed.into_iter().cloned().collect();

        next.version = self.version + 1;
        *self = next;
        Ok(report)
    }

    fn layer_ids(&self, layer: LayerId) -> BTreeSet<String> {
        let concepts = self
            .concepts
            .values()
            .filter(|c| c.layer == layer)
            .map(|c| c.id.to_string());
        let properties = self
            .properties
            .values()
            .filter(|p| p.layer == layer)
            .map(|p| p.id.to_string());
        let individuals = self
            .individuals
            .values()
            .filter(|i| i.layer == layer)
            .map(|i| i.id.to_string());
        concepts.chain(properties).chain(individuals).collect()
    }

    /// Load one layer document as a single batch. Entities may appear in
    /// any order; the batch is validated as a whole and rejected as a whole.
    pub fn load_layer(&mut self, doc: &LayerDoc) -> Result<()> {
        let mut next = self.clone();
        let mut violations = Vec::new();
        next.insert_layer_raw(doc, &mut violations);
        violations.extend(next.validate());
        if !violations.is_empty() {
            return Err(KbError::InvalidLayer {
                layer: doc.layer,
                violations,
            });
        }
        next.version = self.version + 1;
        *self = next;
        Ok(())
    }

    pub fn from_layers<'a>(docs: impl IntoIterator<Item = &'a LayerDoc>) -> Result<Self> {
        let mut docs: Vec<&LayerDoc> = docs.into_iter().collect();
        docs.sort_by_key(|d| d.layer);
        let mut kb = KnowledgeBase::new();
        for doc in docs {
            kb.load_layer(doc)?;
        }
        Ok(kb)
    }
}

fn dedup_in_order<T: Ord + Clone>(items: &mut Vec<T>) {
    let mut seen = BTreeSet::new();
    items.retain(|t| seen.insert(t.clone()));
}
