use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::vector::{cosine, round_significant, SparseVector};
use super::IndexError;
use crate::kbase::ConceptId;

/// Corpus statistics TF-IDF weighting needs.
pub trait DocStats<K> {
    fn doc_count(&self) -> usize;
    fn df(&self, term: &K) -> usize;
}

/// `(1 + ln count) · ln(N / df)` per term. Terms with a zero count, zero
/// document frequency, or a non-positive weight are left out.
pub fn tfidf<K: Ord + Clone>(
    stats: &impl DocStats<K>,
    counts: &BTreeMap<K, f64>,
) -> Result<SparseVector<K>, IndexError> {
    let n = stats.doc_count();
    if n == 0 {
        return Err(IndexError::EmptyCorpus);
    }
    let mut v = SparseVector::new();
    for (term, &count) in counts {
        let df = stats.df(term);
        if count <= 0.0 || df == 0 {
            continue;
        }
        let weight = (1.0 + count.ln()) * (n as f64 / df as f64).ln();
        v.set(term.clone(), weight);
    }
    Ok(v)
}

/// Inverted index over frozen TF-IDF vectors.
///
/// `df[t]` counts the indexed documents whose vector has a nonzero entry
/// for `t`; vectors are never reweighted after insertion.
#[derive(Clone, Debug, PartialEq)]
pub struct TermIndex<K: Ord> {
    doc_count: usize,
    df: BTreeMap<K, usize>,
    vectors: BTreeMap<String, SparseVector<K>>,
    inverted: BTreeMap<K, BTreeSet<String>>,
}

pub type CorpusIndex = TermIndex<ConceptId>;
pub type KeywordIndex = TermIndex<String>;

impl<K: Ord> Default for TermIndex<K> {
    fn default() -> Self {
        TermIndex {
            doc_count: 0,
            df: BTreeMap::new(),
            vectors: BTreeMap::new(),
            inverted: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> DocStats<K> for TermIndex<K> {
    fn doc_count(&self) -> usize {
        self.doc_count
    }

    fn df(&self, term: &K) -> usize {
        self.df.get(term).copied().unwrap_or(0)
    }
}

/// The index as it would be once one more document with the given term
/// support is added.
pub struct WithPending<'a, K: Ord> {
    index: &'a TermIndex<K>,
    pending: &'a BTreeMap<K, f64>,
}

impl<K: Ord + Clone> DocStats<K> for WithPending<'_, K> {
    fn doc_count(&self) -> usize {
        self.index.doc_count + 1
    }

    fn df(&self, term: &K) -> usize {
        let own = usize::from(self.pending.get(term).is_some_and(|c| *c > 0.0));
        self.index.df(term) + own
    }
}

/// Occurrence statistics of a whole batch of documents.
struct BatchStats<K: Ord> {
    n: usize,
    df: BTreeMap<K, usize>,
}

impl<K: Ord + Clone> DocStats<K> for BatchStats<K> {
    fn doc_count(&self) -> usize {
        self.n
    }

    fn df(&self, term: &K) -> usize {
        self.df.get(term).copied().unwrap_or(0)
    }
}

impl<K: Ord + Clone> TermIndex<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.doc_count
    }

    pub fn is_empty(&self) -> bool {
        self.doc_count == 0
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.vectors.contains_key(doc_id)
    }

    pub fn vector(&self, doc_id: &str) -> Option<&SparseVector<K>> {
        self.vectors.get(doc_id)
    }

    pub fn vectors(&self) -> impl Iterator<Item = (&String, &SparseVector<K>)> {
        self.vectors.iter()
    }

    pub fn postings(&self, term: &K) -> Option<&BTreeSet<String>> {
        self.inverted.get(term)
    }

    pub fn document_frequencies(&self) -> &BTreeMap<K, usize> {
        &self.df
    }

    pub fn with_pending<'a>(&'a self, counts: &'a BTreeMap<K, f64>) -> WithPending<'a, K> {
        WithPending {
            index: self,
            pending: counts,
        }
    }

    /// Store a document vector. Weights are rounded to the 12 significant
    /// digits snapshots keep, so a reloaded index equals the live one.
    pub fn index_article(&mut self, doc_id: &str, vector: SparseVector<K>) -> Result<(), IndexError> {
        if self.vectors.contains_key(doc_id) {
            return Err(IndexError::DuplicateDoc(doc_id.to_owned()));
        }
        let vector = vector.map_weights(round_significant);
        for term in vector.keys() {
            *self.df.entry(term.clone()).or_default() += 1;
            self.inverted
                .entry(term.clone())
                .or_default()
                .insert(doc_id.to_owned());
        }
        self.doc_count += 1;
        self.vectors.insert(doc_id.to_owned(), vector);
        Ok(())
    }

    /// Weight `counts` against the index including the new document itself,
    /// then insert it. Returns the stored vector.
    pub fn add_counts(&mut self, doc_id: &str, counts: &BTreeMap<K, f64>) -> Result<SparseVector<K>, IndexError> {
        if self.vectors.contains_key(doc_id) {
            return Err(IndexError::DuplicateDoc(doc_id.to_owned()));
        }
        let vector = tfidf(&self.with_pending(counts), counts)?;
        self.index_article(doc_id, vector)?;
        Ok(self.vectors[doc_id].clone())
    }

    /// Build an index in one pass over a fixed corpus: document frequencies
    /// are taken over the whole batch before any vector is weighted.
    pub fn build_batch<'a>(docs: impl IntoIterator<Item = (&'a str, &'a BTreeMap<K, f64>)>) -> Result<Self, IndexError>
    where
        K: 'a,
    {
        let docs: Vec<(&str, &BTreeMap<K, f64>)> = docs.into_iter().collect();
        let mut stats = BatchStats {
            n: docs.len(),
            df: BTreeMap::new(),
        };
        for (_, counts) in &docs {
            for (term, c) in counts.iter() {
                if *c > 0.0 {
                    *stats.df.entry(term.clone()).or_default() += 1;
                }
            }
        }
        let mut index = TermIndex::new();
        for (id, counts) in docs {
            let v = tfidf(&stats, counts)?;
            index.index_article(id, v)?;
        }
        Ok(index)
    }

    /// Top-`k` documents by cosine with `q` among those sharing a term with
    /// it; score descending, doc id ascending.
    pub fn query(&self, q: &SparseVector<K>, k: usize) -> Vec<(String, f64)> {
        let mut candidates: BTreeSet<&String> = BTreeSet::new();
        for term in q.keys() {
            if let Some(p) = self.inverted.get(term) {
                candidates.extend(p);
            }
        }
        let mut scored: Vec<(String, f64)> = candidates
            .into_iter()
            .map(|d| (d.clone(), cosine(q, &self.vectors[d])))
            .filter(|(_, s)| *s > 0.0)
            .collect();
        rank(&mut scored);
        scored.truncate(k);
        scored
    }
}

/// Sort by score descending, then id ascending.
pub fn rank(items: &mut [(String, f64)]) {
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

#[derive(Serialize, Deserialize)]
#[serde(bound(
    serialize = "K: Serialize + Ord",
    deserialize = "K: Deserialize<'de> + Ord"
))]
struct Snapshot<K: Ord> {
    #[serde(rename = "N")]
    n: usize,
    df: BTreeMap<K, usize>,
    vectors: BTreeMap<String, SparseVector<K>>,
}

impl<K: Ord + Clone + Serialize> Serialize for TermIndex<K> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Snapshot {
            n: self.doc_count,
            df: self.df.clone(),
            vectors: self.vectors.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, K: Ord + Clone + DeserializeOwned> Deserialize<'de> for TermIndex<K> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let snap = Snapshot::<K>::deserialize(deserializer)?;
        let mut inverted: BTreeMap<K, BTreeSet<String>> = BTreeMap::new();
        for (doc, v) in &snap.vectors {
            for term in v.keys() {
                inverted.entry(term.clone()).or_default().insert(doc.clone());
            }
        }
        let consistent = snap.df.len() == inverted.len()
            && snap
                .df
                .iter()
                .all(|(t, n)| inverted.get(t).map(BTreeSet::len) == Some(*n));
        if !consistent || snap.n != snap.vectors.len() {
            return Err(serde::de::Error::custom(
                "index snapshot is inconsistent: df does not match vectors",
            ));
        }
        Ok(TermIndex {
            doc_count: snap.n,
            df: snap.df,
            vectors: snap.vectors,
            inverted,
        })
    }
}
