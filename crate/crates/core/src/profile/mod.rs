//! User profiles: concept vectors seeded from subscription criteria and
//! moved by explicit ratings and reading signals.

use std::collections::BTreeSet;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::ConceptVector;
use crate::kbase::{ConceptId, KnowledgeBase};

pub const DEFAULT_ALPHA: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("a profile needs at least one seed concept")]
    EmptySeeds,
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("unknown feedback kind `{0}`")]
    UnknownSignalKind(String),
    #[error("explicit ratings are -1 or +1, got {0:?}")]
    InvalidRating(Option<i64>),
    #[error("the article has an empty concept vector")]
    EmptyArticleVector,
    #[error("learning rate must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("signal strength must lie in [-1, 1], got {0}")]
    InvalidStrength(f64),
    #[error("feedback for user `{event}` applied to profile of `{profile}`")]
    WrongUser { profile: String, event: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Signal {
    Opened,
    ReadLong,
    Skipped,
}

impl Signal {
    pub fn name(self) -> &'static str {
        match self {
            Signal::Opened => "opened",
            Signal::ReadLong => "readLong",
            Signal::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeedbackKind {
    /// +1 or -1.
    Explicit(i8),
    Implicit(Signal),
}

impl FeedbackKind {
    /// Parse the wire form: `explicit` with a rating, or a signal name.
    pub fn parse(kind: &str, rating: Option<i64>) -> Result<Self, ProfileError> {
        match kind {
            "explicit" => match rating {
                Some(1) => Ok(FeedbackKind::Explicit(1)),
                Some(-1) => Ok(FeedbackKind::Explicit(-1)),
                other => Err(ProfileError::InvalidRating(other)),
            },
            "opened" => Ok(FeedbackKind::Implicit(Signal::Opened)),
            "readLong" => Ok(FeedbackKind::Implicit(Signal::ReadLong)),
            "skipped" => Ok(FeedbackKind::Implicit(Signal::Skipped)),
            other => Err(ProfileError::UnknownSignalKind(other.to_owned())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeedbackKind::Explicit(_) => "explicit",
            FeedbackKind::Implicit(s) => s.name(),
        }
    }

    pub fn rating(self) -> Option<i64> {
        match self {
            FeedbackKind::Explicit(r) => Some(r.into()),
            FeedbackKind::Implicit(_) => None,
        }
    }
}

impl fmt::Display for FeedbackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeedbackKind::Explicit(r) => write!(f, "explicit({r:+})"),
            FeedbackKind::Implicit(s) => f.write_str(s.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEvent", into = "RawEvent")]
pub struct FeedbackEvent {
    pub user_id: String,
    pub article_id: String,
    pub kind: FeedbackKind,
    pub timestamp: DateTime<Utc>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawEvent {
    article_id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rating: Option<i64>,
    timestamp: DateTime<Utc>,
    user_id: String,
}

impl TryFrom<RawEvent> for FeedbackEvent {
    type Error = ProfileError;

    fn try_from(raw: RawEvent) -> Result<Self, Self::Error> {
        Ok(FeedbackEvent {
            user_id: raw.user_id,
            article_id: raw.article_id,
            kind: FeedbackKind::parse(&raw.kind, raw.rating)?,
            timestamp: raw.timestamp,
        })
    }
}

impl From<FeedbackEvent> for RawEvent {
    fn from(e: FeedbackEvent) -> Self {
        RawEvent {
            article_id: e.article_id,
            kind: e.kind.name().to_owned(),
            rating: e.kind.rating(),
            timestamp: e.timestamp,
            user_id: e.user_id,
        }
    }
}

/// Strengths of the implicit reading signals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SignalTable {
    pub opened: f64,
    pub read_long: f64,
    pub skipped: f64,
}

impl Default for SignalTable {
    fn default() -> Self {
        SignalTable {
            opened: 0.2,
            read_long: 0.5,
            skipped: -0.1,
        }
    }
}

pub fn signal_strength(kind: FeedbackKind, table: &SignalTable) -> f64 {
    match kind {
        FeedbackKind::Explicit(r) => r.into(),
        FeedbackKind::Implicit(Signal::Opened) => table.opened,
        FeedbackKind::Implicit(Signal::ReadLong) => table.read_long,
        FeedbackKind::Implicit(Signal::Skipped) => table.skipped,
    }
}

/// A feedback event together with the strength and learning rate it was
/// applied with, so replays do not depend on the current configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    #[serde(flatten)]
    pub event: FeedbackEvent,
    pub alpha: f64,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Profile {
    pub user_id: String,
    pub seeds: BTreeSet<ConceptId>,
    pub vector: ConceptVector,
    pub history: Vec<HistoryEntry>,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

fn seed_vector(seeds: &BTreeSet<ConceptId>) -> ConceptVector {
    let w = 1.0 / (seeds.len() as f64).sqrt();
    seeds.iter().map(|s| (s.clone(), w)).collect()
}

pub fn init_profile(
    user_id: &str,
    seeds: impl IntoIterator<Item = ConceptId>,
    kb: &KnowledgeBase,
    now: DateTime<Utc>,
) -> Result<Profile, ProfileError> {
    let seeds: BTreeSet<ConceptId> = seeds.into_iter().collect();
    if seeds.is_empty() {
        return Err(ProfileError::EmptySeeds);
    }
    if let Some(bad) = seeds.iter().find(|s| kb.concept(s.as_str()).is_none()) {
        return Err(ProfileError::UnknownConcept(bad.to_string()));
    }
    Ok(Profile {
        user_id: user_id.to_owned(),
        vector: seed_vector(&seeds),
        seeds,
        history: Vec::new(),
        created_at: now,
        updated_at: now,
    })
}

/// The vector update alone. Positive strengths blend the profile toward
/// the article; negative ones subtract it and clip at zero.
pub fn blend(p: &ConceptVector, v: &ConceptVector, s: f64, alpha: f64) -> ConceptVector {
    if s == 0.0 {
        return p.clone();
    }
    let v = v.normalized();
    let mut keys: BTreeSet<&ConceptId> = p.keys().collect();
    keys.extend(v.keys());
    let step = alpha * s.abs();
    let mixed: ConceptVector = if s > 0.0 {
        keys.into_iter()
            .map(|k| (k.clone(), (1.0 - step) * p.get(k) + step * v.get(k)))
            .collect()
    } else {
        keys.into_iter()
            .map(|k| (k.clone(), (p.get(k) - step * v.get(k)).max(0.0)))
            .collect()
    };
    mixed.normalized()
}

pub fn apply_feedback(
    profile: &Profile,
    event: FeedbackEvent,
    article: &ConceptVector,
    strength: f64,
    alpha: f64,
) -> Result<Profile, ProfileError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ProfileError::InvalidAlpha(alpha));
    }
    if !(-1.0..=1.0).contains(&strength) {
        return Err(ProfileError::InvalidStrength(strength));
    }
    if article.is_empty() {
        return Err(ProfileError::EmptyArticleVector);
    }
    if event.user_id != profile.user_id {
        return Err(ProfileError::WrongUser {
            profile: profile.user_id.clone(),
            event: event.user_id,
        });
    }
    let mut vector = blend(&profile.vector, article, strength, alpha);
    if vector.is_empty() {
        vector = seed_vector(&profile.seeds);
    }
    let mut next = profile.clone();
    next.vector = vector;
    next.updated_at = event.timestamp;
    next.history.push(HistoryEntry {
        event,
        alpha,
        strength,
    });
    Ok(next)
}

/// Rebuild a profile from its seeds and history. `article` resolves the
/// frozen concept vector of each article the history mentions.
pub fn replay<'a>(
    profile: &Profile,
    kb: &KnowledgeBase,
    article: impl Fn(&str) -> Option<&'a ConceptVector>,
) -> Result<Profile, ProfileError> {
    let mut p = init_profile(&profile.user_id, profile.seeds.iter().cloned(), kb, profile.created_at)?;
    let empty = ConceptVector::new();
    for h in &profile.history {
        let v = article(&h.event.article_id).unwrap_or(&empty);
        p = apply_feedback(&p, h.event.clone(), v, h.strength, h.alpha)?;
    }
    Ok(p)
}
