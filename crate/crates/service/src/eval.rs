//! Side-by-side evaluation of the concept recommender and a plain
//! keyword vector-space baseline over the same corpus.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use ontorec::extract::Document;
use ontorec::index::{keyword_counts, raw_counts, tfidf, CorpusIndex, KeywordIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};
use crate::store::State;

fn default_k() -> usize {
    2
}

/// Labeled cases: an interest stated as free text and the articles that
/// satisfy it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EvalSpec {
    #[serde(default = "default_k")]
    pub k: usize,
    pub cases: Vec<EvalCase>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EvalCase {
    pub name: String,
    pub query: String,
    pub relevant: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemResult {
    pub retrieved: Vec<String>,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseReport {
    pub name: String,
    pub concept: SystemResult,
    pub keyword: SystemResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Mean {
    pub precision: f64,
    pub recall: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricsReport {
    pub k: usize,
    pub cases: Vec<CaseReport>,
    pub concept: Mean,
    pub keyword: Mean,
}

fn metrics(retrieved: Vec<(String, f64)>, relevant: &BTreeSet<String>, k: usize) -> SystemResult {
    let retrieved: Vec<String> = retrieved.into_iter().map(|(d, _)| d).collect();
    let hits = retrieved.iter().filter(|d| relevant.contains(*d)).count() as f64;
    SystemResult {
        precision: if k == 0 { 0.0 } else { hits / k as f64 },
        recall: hits / relevant.len() as f64,
        retrieved,
    }
}

fn mean<'a>(items: impl Iterator<Item = &'a SystemResult>) -> Mean {
    let (mut p, mut r, mut n) = (0.0, 0.0, 0.0);
    for s in items {
        p += s.precision;
        r += s.recall;
        n += 1.0;
    }
    Mean {
        precision: p / n,
        recall: r / n,
    }
}

/// Both systems index the whole corpus in one batch and rank it by cosine
/// against the TF-IDF weighted query.
pub fn eval_baseline(state: &State, spec: &EvalSpec) -> Result<MetricsReport> {
    if state.articles.is_empty() {
        return Err(ServiceError::EmptyCorpus);
    }
    if spec.cases.is_empty() {
        return Err(ServiceError::EmptyEvalSpec);
    }
    for case in &spec.cases {
        if case.relevant.is_empty() {
            return Err(ServiceError::SchemaError(format!("case `{}` lists no relevant article", case.name)));
        }
        if let Some(missing) = case.relevant.iter().find(|d| !state.articles.contains_key(*d)) {
            return Err(ServiceError::not_found("article", missing.as_str()));
        }
    }

    let expansion = state.config.expansion();
    let mut concept_counts = BTreeMap::new();
    let mut word_counts = BTreeMap::new();
    for (id, a) in &state.articles {
        let anns = state.annotations.get(id).map(Vec::as_slice).unwrap_or(&[]);
        concept_counts.insert(id.as_str(), raw_counts(anns, &state.kb, expansion)?);
        word_counts.insert(id.as_str(), keyword_counts(&a.doc));
    }
    let concepts = CorpusIndex::build_batch(concept_counts.iter().map(|(d, c)| (*d, c)))?;
    let words = KeywordIndex::build_batch(word_counts.iter().map(|(d, c)| (*d, c)))?;

    let mut cases = Vec::new();
    for case in &spec.cases {
        let query = Document {
            id: "query".into(),
            title: String::new(),
            body: case.query.clone(),
            published_date: NaiveDate::default(),
        };
        let anns = state.extractor.annotate(&query);
        let cq = tfidf(&concepts, &raw_counts(&anns, &state.kb, expansion)?)?;
        let wq = tfidf(&words, &keyword_counts(&query))?;
        cases.push(CaseReport {
            name: case.name.clone(),
            concept: metrics(concepts.query(&cq, spec.k), &case.relevant, spec.k),
            keyword: metrics(words.query(&wq, spec.k), &case.relevant, spec.k),
        });
    }
    Ok(MetricsReport {
        k: spec.k,
        concept: mean(cases.iter().map(|c| &c.concept)),
        keyword: mean(cases.iter().map(|c| &c.keyword)),
        cases,
    })
}
