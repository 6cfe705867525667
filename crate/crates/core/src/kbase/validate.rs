use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ConceptId, KbError, KnowledgeBase, Range};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    DuplicateId,
    UnknownParent,
    Cycle,
    LayerViolation,
    UnknownDomainConcept,
    UnknownRangeConcept,
    EmptyTypes,
    UnknownType,
    UnknownSubject,
    UnknownProperty,
    UnknownObject,
    DomainViolation,
    RangeViolation,
}

/// One broken invariant, naming the rule and the offending id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub id: String,
    pub detail: String,
}

impl Violation {
    pub fn new(rule: Rule, id: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation {
            rule,
            id: id.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} `{}`: {}", self.rule, self.id, self.detail)
    }
}

impl KnowledgeBase {
    /// Check every invariant. Returns an empty list iff the knowledge base
    /// is consistent. Assertions flagged by a domain swap are skipped.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        for c in self.concepts.values() {
            for p in &c.parents {
                match self.concepts.get(p) {
                    None => out.push(Violation::new(
                        Rule::UnknownParent,
                        c.id.as_str(),
                        format!("parent `{p}` does not exist"),
                    )),
                    Some(parent) if !c.layer.may_reference(parent.layer) => out.push(Violation::new(
                        Rule::LayerViolation,
                        c.id.as_str(),
                        format!("{} concept under {} parent `{p}`", c.layer, parent.layer),
                    )),
                    Some(_) => {}
                }
            }
        }

        for cycle in self.cyclic_components() {
            out.push(Violation::new(
                Rule::Cycle,
                cycle[0].as_str(),
                format!(
                    "subclass cycle through {}",
                    cycle.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", ")
                ),
            ));
        }

        for p in self.properties.values() {
            match self.concepts.get(&p.domain) {
                None => out.push(Violation::new(
                    Rule::UnknownDomainConcept,
                    p.id.as_str(),
                    format!("domain `{}` does not exist", p.domain),
                )),
                Some(d) if !p.layer.may_reference(d.layer) => out.push(Violation::new(
                    Rule::LayerViolation,
                    p.id.as_str(),
                    format!("{} property with {} domain", p.layer, d.layer),
                )),
                Some(_) => {}
            }
            if let Range::Concept(r) = &p.range {
                match self.concepts.get(r) {
                    None => out.push(Violation::new(
                        Rule::UnknownRangeConcept,
                        p.id.as_str(),
                        format!("range `{r}` does not exist"),
                    )),
                    Some(rc) if !p.layer.may_reference(rc.layer) => out.push(Violation::new(
                        Rule::LayerViolation,
                        p.id.as_str(),
                        format!("{} property with {} range", p.layer, rc.layer),
                    )),
                    Some(_) => {}
                }
            }
        }

        for i in self.individuals.values() {
            if i.types.is_empty() {
                out.push(Violation::new(Rule::EmptyTypes, i.id.as_str(), "no asserted type"));
            }
            for t in &i.types {
                match self.concepts.get(t) {
                    None => out.push(Violation::new(
                        Rule::UnknownType,
                        i.id.as_str(),
                        format!("type `{t}` does not exist"),
                    )),
                    Some(c) if !i.layer.may_reference(c.layer) => out.push(Violation::new(
                        Rule::LayerViolation,
                        i.id.as_str(),
                        format!("{} individual typed by {} concept `{t}`", i.layer, c.layer),
                    )),
                    Some(_) => {}
                }
            }
        }

        for record in self.assertions.iter().filter(|r| !r.flagged) {
            let a = &record.assertion;
            if let Err(e) = self.check_assertion(a) {
                let rule = match &e {
                    KbError::UnknownId(id) if *id == a.subject.as_str() => Rule::UnknownSubject,
                    KbError::UnknownId(id) if *id == a.property.as_str() => Rule::UnknownProperty,
                    KbError::UnknownId(_) => Rule::UnknownObject,
                    KbError::DomainViolation { .. } => Rule::DomainViolation,
                    _ => Rule::RangeViolation,
                };
                out.push(Violation::new(rule, a.key(), e.to_string()));
            }
        }

        out
    }

    /// Strongly connected components of the subclass graph that contain a
    /// cycle, each sorted, smallest id first.
    fn cyclic_components(&self) -> Vec<Vec<ConceptId>> {
        let ids: Vec<&ConceptId> = self.concepts.keys().collect();
        let index: BTreeMap<&ConceptId, usize> =
            ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let succ: Vec<Vec<usize>> = ids
            .iter()
            .map(|id| {
                self.concepts[*id]
                    .parents
                    .iter()
                    .filter_map(|p| index.get(p).copied())
                    .collect()
            })
            .collect();

        // Iterative Tarjan.
        let n = ids.len();
        let mut order = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut components = Vec::new();
        for root in 0..n {
            if order[root] != usize::MAX {
                continue;
            }
            let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
            order[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(top) = frames.last_mut() {
                let v = top.0;
                if top.1 < succ[v].len() {
                    let w = succ[v][top.1];
                    top.1 += 1;
                    if order[w] == usize::MAX {
                        order[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(order[w]);
                    }
                } else {
                    frames.pop();
                    if let Some(&(parent, _)) = frames.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == order[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        let cyclic = comp.len() > 1 || succ[v].contains(&v);
                        if cyclic {
                            let mut members: Vec<ConceptId> =
                                comp.into_iter().map(|i| ids[i].clone()).collect();
                            members.sort();
                            components.push(members);
                        }
                    }
                }
            }
        }
        components.sort();
        components
    }

    /// Topological order of concepts, parents before children. `None` if
    /// the subclass graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<ConceptId>> {
        let mut pending: BTreeMap<&ConceptId, usize> = self
            .concepts
            .values()
            .map(|c| {
                let known = c.parents.iter().filter(|p| self.concepts.contains_key(*p)).count();
                (&c.id, known)
            })
            .collect();
        let mut children: BTreeMap<&ConceptId, Vec<&ConceptId>> = BTreeMap::new();
        for c in self.concepts.values() {
            for p in c.parents.iter().filter(|p| self.concepts.contains_key(*p)) {
                children.entry(p).or_default().push(&c.id);
            }
        }
        let mut ready: Vec<&ConceptId> = pending
            .iter()
            .filter(|(_, n)| **n == 0)
            .map(|(id, _)| *id)
            .collect();
        let mut out = Vec::with_capacity(self.concepts.len());
        while let Some(id) = ready.pop() {
            out.push(id.clone());
            for child in children.get(id).into_iter().flatten() {
                let n = pending.get_mut(child).expect("known concept");
                *n -= 1;
                if *n == 0 {
                    ready.push(child);
                }
            }
        }
        (out.len() == self.concepts.len()).then_some(out)
    }
}
