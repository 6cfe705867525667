use super::gazetteer::LexicalEntry;
use super::pattern::RuleSet;
use super::tokenize::{normalize_surface, slice_chars};
use super::types::{Annotation, Source};
use super::ExtractError;
use crate::kbase::{ConceptId, Individual, IndividualId, KnowledgeBase};

/// Outcome of one population batch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Population {
    pub new_individuals: Vec<IndividualId>,
    pub new_entries: Vec<LexicalEntry>,
}

/// Add the entities discovered by individual-creating pattern rules to the
/// ABox and link their annotations.
///
/// A mention whose normalized surface (case-folded, whitespace collapsed)
/// equals the label of an existing instance of the rule concept is linked
/// to that instance; otherwise a new individual typed by the concept is
/// created together with a lexicon entry for its surface. The batch is
/// atomic: on error neither `kb`, `lexicon` nor `annotations` change.
pub fn populate(
    kb: &mut KnowledgeBase,
    lexicon: &mut Vec<LexicalEntry>,
    rules: &RuleSet,
    text: &str,
    annotations: &mut [Annotation],
) -> Result<Population, ExtractError> {
    let mut next = kb.clone();
    let mut out = Population::default();
    let mut links: Vec<(usize, IndividualId)> = Vec::new();

    for (pos, ann) in annotations.iter().enumerate() {
        if ann.source != Source::Pattern || ann.individual.is_some() {
            continue;
        }
        let Some(rule) = ann.rule_name.as_deref().and_then(|n| rules.get(n)) else {
            continue;
        };
        if !rule.action.create_individual {
            continue;
        }
        let surface = slice_chars(text, ann.span.start, ann.span.end);
        let key = normalize_surface(&surface);
        if key.is_empty() {
            continue;
        }
        let id = match find_existing(&next, &ann.concept, &key)? {
            Some(id) => id,
            None => {
                let concept = next
                    .concept(ann.concept.as_str())
                    .ok_or_else(|| ExtractError::UnknownConcept {
                        rule: rule.name.clone(),
                        concept: ann.concept.to_string(),
                    })?;
                let layer = concept.layer;
                let id = fresh_id(&next, layer.name(), &key);
                let label = surface.split_whitespace().collect::<Vec<_>>().join(" ");
                next.add_individual(Individual::new(id.clone(), label.clone(), ann.concept.clone(), layer))?;
                out.new_individuals.push(id.clone());
                out.new_entries.push(LexicalEntry::new(label, id.to_string()));
                id
            }
        };
        links.push((pos, id));
    }

    *kb = next;
    lexicon.extend(out.new_entries.iter().cloned());
    for (pos, id) in links {
        annotations[pos].individual = Some(id);
    }
    Ok(out)
}

fn find_existing(
    kb: &KnowledgeBase,
    concept: &ConceptId,
    key: &str,
) -> Result<Option<IndividualId>, ExtractError> {
    Ok(kb
        .instances_of(concept.as_str(), true)?
        .into_iter()
        .find(|id| {
            kb.individual(id.as_str())
                .is_some_and(|i| normalize_surface(&i.label) == key)
        }))
}

fn fresh_id(kb: &KnowledgeBase, layer: &str, key: &str) -> IndividualId {
    let mut slug = String::with_capacity(key.len());
    for c in key.chars() {
        if c.is_alphanumeric() {
            slug.push(c);
        } else if !slug.ends_with('_') {
            slug.push('_');
        }
    }
    let slug = slug.trim_matches('_');
    let base = format!("{layer}:{slug}");
    if kb.individual(&base).is_none() {
        return base.into();
    }
    (2..)
        .map(|n| format!("{base}_{n}"))
        .find(|id| kb.individual(id).is_none())
        .expect("unbounded suffix search")
        .into()
}
