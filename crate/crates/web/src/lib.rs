//! Browser demo: annotate text, compare concept and keyword retrieval, and
//! watch a profile move under feedback. [`DemoCore`] holds the logic;
//! [`Demo`] is its JavaScript face.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, TimeZone, Utc};
use ontorec::extract::{populate, Annotation, Document, Extractor, LexicalEntry};
use ontorec::fixtures;
use ontorec::index::{keyword_counts, raw_counts, tfidf, CorpusIndex, Expansion, KeywordIndex};
use ontorec::kbase::{KnowledgeBase, LayerId};
use ontorec::profile::{apply_feedback, init_profile, FeedbackEvent, FeedbackKind, Profile};
use ontorec::recommend::generate_review;
use serde::Serialize;
use wasm_bindgen::prelude::*;

pub const SAMPLE_ARTICLES: &str = include_str!("../data/articles.json");
const ALPHA: f64 = 0.3;
const GAMMA: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Mention {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub concept: String,
    pub concept_label: String,
    pub individual: Option<String>,
    pub source: String,
    pub normalized_value: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Hit {
    pub article_id: String,
    pub title: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub concept: Vec<Hit>,
    pub keyword: Vec<Hit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConceptInfo {
    pub id: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileView {
    pub weights: Vec<(String, f64)>,
    pub review: Vec<Hit>,
}

pub struct DemoCore {
    kb: KnowledgeBase,
    extractor: Extractor,
    articles: Vec<Document>,
    annotations: BTreeMap<String, Vec<Annotation>>,
    index: CorpusIndex,
    profile: Option<Profile>,
    clock: i64,
}

fn tick(n: i64) -> DateTime<Utc> {
    Utc.timestamp_opt(1_294_000_000 + n, 0).unwrap()
}

impl DemoCore {
    pub fn new() -> Result<Self, String> {
        let articles: Vec<Document> = serde_json::from_str(SAMPLE_ARTICLES).map_err(|e| e.to_string())?;
        Self::with_articles(articles)
    }

    /// Ingest `articles` in order into a fresh copy of the shipped knowledge base.
    pub fn with_articles(articles: Vec<Document>) -> Result<Self, String> {
        let mut kb = fixtures::knowledge_base();
        let mut lexicon: Vec<LexicalEntry> = fixtures::lexicon();
        let rules = fixtures::rules();
        let mut extractor = Extractor::new(&kb, &lexicon, &rules).map_err(|e| e.to_string())?;
        let mut annotations = BTreeMap::new();
        let mut index = CorpusIndex::new();
        for a in &articles {
            let mut anns = extractor.annotate(a);
            let pop = populate(&mut kb, &mut lexicon, &extractor.rules, &a.full_text(), &mut anns)
                .map_err(|e| e.to_string())?;
            if !pop.new_entries.is_empty() {
                extractor = Extractor::new(&kb, &lexicon, &rules).map_err(|e| e.to_string())?;
            }
            let counts = raw_counts(&anns, &kb, Expansion::with_decay(GAMMA)).map_err(|e| e.to_string())?;
            index.add_counts(&a.id, &counts).map_err(|e| e.to_string())?;
            annotations.insert(a.id.clone(), anns);
        }
        Ok(DemoCore {
            kb,
            extractor,
            articles,
            annotations,
            index,
            profile: None,
            clock: 0,
        })
    }

    pub fn articles(&self) -> &[Document] {
        &self.articles
    }

    /// Domain concepts a profile can be seeded with.
    pub fn concepts(&self) -> Vec<ConceptInfo> {
        self.kb
            .concepts()
            .filter(|c| c.layer == LayerId::Domain)
            .map(|c| ConceptInfo {
                id: c.id.to_string(),
                label: c.label.clone(),
            })
            .collect()
    }

    pub fn annotate(&self, text: &str) -> Result<Vec<Mention>, String> {
        let mut kb = self.kb.clone();
        let mut lexicon = Vec::new();
        let mut anns = self.extractor.annotate_text("input", text);
        populate(&mut kb, &mut lexicon, &self.extractor.rules, text, &mut anns).map_err(|e| e.to_string())?;
        let chars: Vec<char> = text.chars().collect();
        Ok(anns
            .into_iter()
            .map(|a| Mention {
                start: a.span.start,
                end: a.span.end,
                surface: chars[a.span.start..a.span.end].iter().collect(),
                concept_label: kb.concept(a.concept.as_str()).map(|c| c.label.clone()).unwrap_or_default(),
                concept: a.concept.to_string(),
                individual: a.individual.map(|i| i.to_string()),
                source: format!("{:?}", a.source).to_lowercase(),
                normalized_value: a.normalized_value,
            })
            .collect())
    }

    fn title(&self, id: &str) -> String {
        self.articles.iter().find(|a| a.id == id).map(|a| a.title.clone()).unwrap_or_default()
    }

    fn hits(&self, ranked: Vec<(String, f64)>) -> Vec<Hit> {
        ranked
            .into_iter()
            .map(|(id, score)| Hit {
                title: self.title(&id),
                article_id: id,
                score,
            })
            .collect()
    }

    /// Rank the sample articles against a free-text query twice: by concept
    /// vectors with hierarchy decay `gamma` (0 turns expansion off), and by
    /// keyword vectors.
    pub fn compare(&self, query: &str, gamma: f64, k: usize) -> Result<Comparison, String> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(format!("gamma must lie in [0, 1], got {gamma}"));
        }
        let expansion = if gamma == 0.0 { Expansion::off() } else { Expansion::with_decay(gamma) };
        let mut concept_counts = Vec::new();
        let mut word_counts = Vec::new();
        for a in &self.articles {
            concept_counts.push(raw_counts(&self.annotations[&a.id], &self.kb, expansion).map_err(|e| e.to_string())?);
            word_counts.push(keyword_counts(a));
        }
        let ids = self.articles.iter().map(|a| a.id.as_str());
        let concepts = CorpusIndex::build_batch(ids.clone().zip(&concept_counts)).map_err(|e| e.to_string())?;
        let words = KeywordIndex::build_batch(ids.zip(&word_counts)).map_err(|e| e.to_string())?;

        let q = Document {
            id: "query".into(),
            title: String::new(),
            body: query.into(),
            published_date: NaiveDate::default(),
        };
        let anns = self.extractor.annotate(&q);
        let cq = tfidf(&concepts, &raw_counts(&anns, &self.kb, expansion).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let wq = tfidf(&words, &keyword_counts(&q)).map_err(|e| e.to_string())?;
        Ok(Comparison {
            concept: self.hits(concepts.query(&cq, k)),
            keyword: self.hits(words.query(&wq, k)),
        })
    }

    pub fn set_profile(&mut self, seeds: &[String]) -> Result<ProfileView, String> {
        let profile = init_profile("demo", seeds.iter().map(|s| s.as_str().into()), &self.kb, tick(0))
            .map_err(|e| e.to_string())?;
        self.profile = Some(profile);
        self.clock = 0;
        self.view()
    }

    /// Apply a +1 or -1 rating on an article and return the new profile and review.
    pub fn rate(&mut self, article_id: &str, rating: i8) -> Result<ProfileView, String> {
        let profile = self.profile.as_ref().ok_or("choose seed concepts first")?;
        let kind = FeedbackKind::parse("explicit", Some(rating.into())).map_err(|e| e.to_string())?;
        let vector = self.index.vector(article_id).ok_or_else(|| format!("unknown article {article_id}"))?;
        self.clock += 1;
        let event = FeedbackEvent {
            user_id: profile.user_id.clone(),
            article_id: article_id.into(),
            kind,
            timestamp: tick(self.clock),
        };
        let next = apply_feedback(profile, event, vector, rating.into(), ALPHA).map_err(|e| e.to_string())?;
        self.profile = Some(next);
        self.view()
    }

    pub fn view(&self) -> Result<ProfileView, String> {
        let profile = self.profile.as_ref().ok_or("choose seed concepts first")?;
        let date = self.articles.first().map(|a| a.published_date).unwrap_or_default();
        let ids = self.articles.iter().map(|a| a.id.as_str());
        let review = generate_review(profile, date, ids, &self.index, self.articles.len(), 0.05)
            .map_err(|e| e.to_string())?;
        let mut weights: Vec<(String, f64)> = profile.vector.iter().map(|(k, w)| (k.to_string(), w)).collect();
        weights.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(ProfileView {
            weights,
            review: self.hits(review.items.into_iter().map(|i| (i.article_id, i.score)).collect()),
        })
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("demo values serialize")
}

#[wasm_bindgen]
pub struct Demo {
    core: DemoCore,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<Demo, JsError> {
        Ok(Demo {
            core: DemoCore::new().map_err(|e| JsError::new(&e))?,
        })
    }

    /// JSON list of `{id, title, body, publishedDate}`.
    pub fn articles(&self) -> String {
        to_json(&self.core.articles())
    }

    /// JSON list of `{id, label}`.
    pub fn concepts(&self) -> String {
        to_json(&self.core.concepts())
    }

    pub fn annotate(&self, text: &str) -> Result<String, JsError> {
        self.core.annotate(text).map(|m| to_json(&m)).map_err(|e| JsError::new(&e))
    }

    pub fn compare(&self, query: &str, gamma: f64, k: usize) -> Result<String, JsError> {
        self.core.compare(query, gamma, k).map(|c| to_json(&c)).map_err(|e| JsError::new(&e))
    }

    /// `seeds` is a JSON list of concept ids.
    #[wasm_bindgen(js_name = setProfile)]
    pub fn set_profile(&mut self, seeds: &str) -> Result<String, JsError> {
        let seeds: Vec<String> = serde_json::from_str(seeds).map_err(|e| JsError::new(&e.to_string()))?;
        self.core.set_profile(&seeds).map(|v| to_json(&v)).map_err(|e| JsError::new(&e))
    }

    pub fn rate(&mut self, article_id: &str, rating: i8) -> Result<String, JsError> {
        self.core.rate(article_id, rating).map(|v| to_json(&v)).map_err(|e| JsError::new(&e))
    }
}
