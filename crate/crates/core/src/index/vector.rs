use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::kbase::ConceptId;

/// Sparse nonnegative vector. Zero, negative and non-finite weights are
/// never stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(
    serialize = "K: Serialize + Ord",
    deserialize = "K: Deserialize<'de> + Ord"
))]
pub struct SparseVector<K: Ord> {
    entries: BTreeMap<K, f64>,
}

/// Vector over ontology concepts.
pub type ConceptVector = SparseVector<ConceptId>;
/// Vector over lowercased words.
pub type KeywordVector = SparseVector<String>;

impl<K: Ord> Default for SparseVector<K> {
    fn default() -> Self {
        SparseVector {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseVector<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (K, f64)>) -> Self {
        let mut v = Self::new();
        for (k, w) in pairs {
            v.set(k, w);
        }
        v
    }

    /// Set a weight; anything not strictly positive and finite removes the entry.
    pub fn set(&mut self, key: K, weight: f64) {
        if weight > 0.0 && weight.is_finite() {
            self.entries.insert(key, weight);
        } else {
            self.entries.remove(&key);
        }
    }

    pub fn get<Q>(&self, key: &Q) -> f64
    where
        K: std::borrow::Borrow<Q>,
        Q: Ord + ?Sized,
    {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.entries.iter().map(|(k, w)| (k, *w))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .entries
            .iter()
            .map(|(k, w)| w * large.get(k))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_pairs(self.entries.iter().map(|(k, w)| (k.clone(), w * factor)))
    }

    /// Unit-length copy; the empty vector stays empty.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return Self::new();
        }
        self.scaled(1.0 / n)
    }

    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_pairs(self.entries.iter().map(|(k, w)| (k.clone(), f(*w))))
    }
}

impl<K: Ord + Clone> FromIterator<(K, f64)> for SparseVector<K> {
    fn from_iter<I: IntoIterator<Item = (K, f64)>>(iter: I) -> Self {
        Self::from_pairs(iter)
    }
}

/// Cosine similarity of two nonnegative vectors, in `[0, 1]`; zero when
/// either side is empty.
pub fn cosine<K: Ord + Clone>(a: &SparseVector<K>, b: &SparseVector<K>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 0.0;
    }
    (a.dot(b) / denom).clamp(0.0, 1.0)
}

/// Round to 12 significant digits, the precision index snapshots keep.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}
