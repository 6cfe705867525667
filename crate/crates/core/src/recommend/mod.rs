//! Daily reviews, alerts on newly discovered entities, and concept digests.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::Annotation;
use crate::index::{cosine, rank, ConceptVector, CorpusIndex};
use crate::kbase::{AssertionDoc, ConceptId, IndividualId, KbError, KnowledgeBase};
use crate::profile::Profile;

pub const DEFAULT_K: usize = 20;
pub const DEFAULT_THETA: f64 = 0.05;
pub const DEFAULT_TAU: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecommendError {
    #[error("article `{0}` is not indexed")]
    UnknownDoc(String),
    #[error("threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Kb(#[from] KbError),
}

pub fn score(profile: &Profile, article: &ConceptVector) -> f64 {
    cosine(&profile.vector, article)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReviewItem {
    pub article_id: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Review {
    pub user_id: String,
    pub date: NaiveDate,
    pub items: Vec<ReviewItem>,
    #[serde(skip)]
    pub threshold: f64,
    #[serde(skip)]
    pub k: usize,
}

impl Review {
    pub fn with_titles(mut self, title: impl Fn(&str) -> Option<String>) -> Self {
        for item in &mut self.items {
            item.title = title(&item.article_id);
        }
        self
    }
}

/// Rank the day's articles against a profile: every article scoring at
/// least `theta`, best first, at most `k` of them.
pub fn generate_review<'a>(
    profile: &Profile,
    date: NaiveDate,
    daily: impl IntoIterator<Item = &'a str>,
    index: &CorpusIndex,
    k: usize,
    theta: f64,
) -> Result<Review, RecommendError> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(RecommendError::InvalidThreshold(theta));
    }
    let daily: BTreeSet<&str> = daily.into_iter().collect();
    let mut scored = Vec::with_capacity(daily.len());
    for doc in daily {
        let v = index
            .vector(doc)
            .ok_or_else(|| RecommendError::UnknownDoc(doc.to_owned()))?;
        let s = score(profile, v);
        if s >= theta {
            scored.push((doc.to_owned(), s));
        }
    }
    rank(&mut scored);
    scored.truncate(k);
    Ok(Review {
        user_id: profile.user_id.clone(),
        date,
        items: scored
            .into_iter()
            .map(|(article_id, score)| ReviewItem {
                article_id,
                score,
                title: None,
            })
            .collect(),
        threshold: theta,
        k,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Alert {
    pub user_id: String,
    pub individual_id: IndividualId,
    pub concept: ConceptId,
    pub triggering_article_id: String,
    pub date: NaiveDate,
}

/// Profile weight an individual attracts: over its asserted types, the
/// best weight among each type and its ancestors, summed.
pub fn relevance(kb: &KnowledgeBase, individual: &IndividualId, profile: &Profile) -> Result<f64, KbError> {
    let ind = kb
        .individual(individual.as_str())
        .ok_or_else(|| KbError::UnknownId(individual.to_string()))?;
    let mut total = 0.0;
    for ty in &ind.types {
        let mut best = profile.vector.get(ty);
        for a in kb.ancestors(ty.as_str())? {
            best = best.max(profile.vector.get(&a));
        }
        total += best;
    }
    Ok(total)
}

/// Alerts for the individuals a batch just created. The alert names the
/// individual's primary type.
pub fn detect_alerts(
    kb: &KnowledgeBase,
    new_individuals: &[IndividualId],
    profile: &Profile,
    tau: f64,
    article_id: &str,
    date: NaiveDate,
) -> Result<Vec<Alert>, RecommendError> {
    let mut alerts = Vec::new();
    let mut seen = BTreeSet::new();
    for id in new_individuals {
        if !seen.insert(id) || relevance(kb, id, profile)? < tau {
            continue;
        }
        let concept = kb
            .individual(id.as_str())
            .and_then(|i| i.primary_type())
            .cloned()
            .ok_or_else(|| KbError::UnknownId(id.to_string()))?;
        alerts.push(Alert {
            user_id: profile.user_id.clone(),
            individual_id: id.clone(),
            concept,
            triggering_article_id: article_id.to_owned(),
            date,
        });
    }
    Ok(alerts)
}

/// Every alert ever fired, keyed by user and individual.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlertLog {
    fired: BTreeMap<(String, IndividualId), Alert>,
}

impl AlertLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Keep the alerts not fired before and remember them.
    pub fn admit(&mut self, alerts: Vec<Alert>) -> Vec<Alert> {
        alerts
            .into_iter()
            .filter(|a| {
                let key = (a.user_id.clone(), a.individual_id.clone());
                if self.fired.contains_key(&key) {
                    return false;
                }
                self.fired.insert(key, a.clone());
                true
            })
            .collect()
    }

    pub fn for_user<'a>(&'a self, user: &'a str) -> impl Iterator<Item = &'a Alert> + 'a {
        self.fired.values().filter(move |a| a.user_id == user)
    }

    pub fn len(&self) -> usize {
        self.fired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fired.is_empty()
    }

    /// One JSON object per line.
    pub fn from_json_lines(text: &str) -> serde_json::Result<Self> {
        let mut log = AlertLog::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let alert: Alert = serde_json::from_str(line)?;
            log.admit(vec![alert]);
        }
        Ok(log)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Digest {
    pub concept: ConceptId,
    pub individuals: Vec<IndividualId>,
    pub assertions: Vec<AssertionDoc>,
    pub supporting_articles: BTreeSet<String>,
}

/// What the knowledge base and the annotated corpus know about the
/// instances of a concept.
pub fn knowledge_digest<'a>(
    kb: &KnowledgeBase,
    annotations: impl IntoIterator<Item = (&'a str, &'a [Annotation])>,
    concept: &str,
) -> Result<Digest, RecommendError> {
    let individuals = kb.instances_of(concept, true)?;
    let assertions = kb
        .assertions()
        .filter(|a| individuals.contains(&a.subject))
        .map(AssertionDoc::from)
        .collect();
    let supporting_articles = annotations
        .into_iter()
        .filter(|(_, anns)| {
            anns.iter()
                .any(|a| a.individual.as_ref().is_some_and(|i| individuals.contains(i)))
        })
        .map(|(doc, _)| doc.to_owned())
        .collect();
    Ok(Digest {
        concept: concept.into(),
        individuals: individuals.into_iter().collect(),
        assertions,
        supporting_articles,
    })
}

#[cfg(test)]
mod tests;
