use std::collections::BTreeMap;

use chrono::NaiveDate;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::extract::{Annotation, Source, Span};
use crate::kbase::{Concept, ConceptId, KnowledgeBase, LayerId};

fn ann(concept: &str) -> Annotation {
    Annotation {
        doc_id: "d".into(),
        span: Span::new(0, 1),
        concept: concept.into(),
        individual: None,
        source: Source::Gazetteer,
        rule_name: None,
        normalized_value: None,
    }
}

fn takeover_kb() -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    kb.add_concept(Concept::new("domain:EconomicEvent", "Economic event", LayerId::Domain)).unwrap();
    kb.add_concept(
        Concept::new("domain:CompanyTakeover", "Takeover", LayerId::Domain).with_parent("domain:EconomicEvent"),
    )
    .unwrap();
    kb.add_concept(Concept::new("upper:Temporal", "Temporal", LayerId::Upper)).unwrap();
    kb.add_concept(Concept::new("corpus:Article", "Article", LayerId::Corpus)).unwrap();
    kb
}

fn counts(pairs: &[(&str, f64)]) -> BTreeMap<ConceptId, f64> {
    pairs.iter().map(|(k, v)| (ConceptId::from(*k), *v)).collect()
}

#[test]
fn raw_counts_with_decay() {
    let kb = takeover_kb();
    let one = raw_counts(&[ann("domain:CompanyTakeover")], &kb, Expansion::with_decay(0.5)).unwrap();
    assert_eq!(one, counts(&[("domain:CompanyTakeover", 1.0), ("domain:EconomicEvent", 0.5)]));
    let two = raw_counts(
        &[ann("domain:CompanyTakeover"), ann("domain:CompanyTakeover")],
        &kb,
        Expansion::with_decay(0.5),
    )
    .unwrap();
    assert_eq!(two, counts(&[("domain:CompanyTakeover", 2.0), ("domain:EconomicEvent", 1.0)]));
    assert!(raw_counts(&[], &kb, Expansion::default()).unwrap().is_empty());
    let flat = raw_counts(&[ann("domain:CompanyTakeover")], &kb, Expansion::off()).unwrap();
    assert_eq!(flat, counts(&[("domain:CompanyTakeover", 1.0)]));
    let undecayed = raw_counts(&[ann("domain:CompanyTakeover")], &kb, Expansion::with_decay(1.0)).unwrap();
    assert_eq!(undecayed["domain:EconomicEvent"], 1.0);
}

#[test]
fn raw_counts_skips_temporal_and_non_domain() {
    let kb = takeover_kb();
    let mut date = ann("upper:Temporal");
    date.normalized_value = Some("2011-01-12".into());
    let got = raw_counts(&[date, ann("corpus:Article")], &kb, Expansion::default()).unwrap();
    assert!(got.is_empty());
    assert_eq!(
        raw_counts(&[ann("domain:Nope")], &kb, Expansion::default()),
        Err(IndexError::UnknownConcept("domain:Nope".into()))
    );
}

struct Stats(usize, BTreeMap<ConceptId, usize>);

impl DocStats<ConceptId> for Stats {
    fn doc_count(&self) -> usize {
        self.0
    }
    fn df(&self, t: &ConceptId) -> usize {
        self.1.get(t).copied().unwrap_or(0)
    }
}

#[test]
fn tfidf_reference_values() {
    let stats = Stats(
        4,
        BTreeMap::from([("domain:A".into(), 1), ("domain:B".into(), 4)]),
    );
    let v = tfidf(&stats, &counts(&[("domain:A", 2.0), ("domain:B", 3.0), ("domain:C", 1.0)])).unwrap();
    let expected = (1.0 + 2f64.ln()) * 4f64.ln();
    assert!((v.get("domain:A") - expected).abs() < 1e-12);
    assert!((v.get("domain:A") - 2.347_200_388_956_293).abs() < 1e-9);
    // idf zero and df zero both drop the term
    assert_eq!(v.len(), 1);
    assert_eq!(tfidf(&Stats(0, BTreeMap::new()), &counts(&[])), Err(IndexError::EmptyCorpus));
}

#[test]
fn tfidf_strictly_decreasing_in_df() {
    for n in 2..30usize {
        let mut prev = f64::INFINITY;
        for df in 1..=n {
            let stats = Stats(n, BTreeMap::from([("domain:A".into(), df)]));
            let w = tfidf(&stats, &counts(&[("domain:A", 3.0)])).unwrap().get("domain:A");
            assert!(w < prev || (w == 0.0 && df == n));
            prev = w;
        }
    }
}

#[test]
fn cosine_reference_values() {
    let a = ConceptVector::from_pairs([("a".into(), 1.0), ("b".into(), 1.0)]);
    let b = ConceptVector::from_pairs([("a".into(), 1.0)]);
    assert!((cosine(&a, &b) - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
    let c = ConceptVector::from_pairs([("c".into(), 2.0)]);
    assert_eq!(cosine(&a, &c), 0.0);
    assert_eq!(cosine(&a, &ConceptVector::new()), 0.0);
}

#[test]
fn sparse_vector_never_stores_zero() {
    let mut v = ConceptVector::from_pairs([("a".into(), 0.0), ("b".into(), -1.0), ("c".into(), f64::NAN)]);
    assert!(v.is_empty());
    v.set("a".into(), 2.0);
    v.set("a".into(), 0.0);
    assert!(v.is_empty());
}

#[test]
fn index_article_counters() {
    let mut idx = CorpusIndex::new();
    idx.index_article("d1", ConceptVector::from_pairs([("c".into(), 1.0)])).unwrap();
    assert_eq!(idx.len(), 1);
    assert_eq!(idx.df(&"c".into()), 1);
    assert_eq!(idx.postings(&"c".into()).unwrap().iter().collect::<Vec<_>>(), vec!["d1"]);
    assert_eq!(
        idx.index_article("d1", ConceptVector::from_pairs([("c".into(), 1.0)])),
        Err(IndexError::DuplicateDoc("d1".into()))
    );
    for k in 2..=5 {
        idx.index_article(&format!("d{k}"), ConceptVector::from_pairs([("c".into(), 1.0)])).unwrap();
        assert_eq!(idx.df(&"c".into()), k);
    }
}

#[test]
fn add_counts_includes_the_new_document() {
    let mut idx = CorpusIndex::new();
    // first document: N=1, df=1, idf 0 → empty vector but counted
    let v = idx.add_counts("d1", &counts(&[("c", 1.0)])).unwrap();
    assert!(v.is_empty());
    assert_eq!(idx.len(), 1);
    let v = idx.add_counts("d2", &counts(&[("c", 1.0)])).unwrap();
    assert!((v.get("c") - 2f64.ln()).abs() < 1e-11);
    assert_eq!(idx.df(&"c".into()), 1);
}

#[test]
fn batch_build_uses_corpus_wide_df() {
    let a = counts(&[("x", 1.0), ("y", 1.0)]);
    let b = counts(&[("x", 1.0)]);
    let idx = CorpusIndex::build_batch([("a", &a), ("b", &b)]).unwrap();
    // x occurs everywhere: weight 0, not stored
    assert_eq!(idx.vector("a").unwrap().get("x"), 0.0);
    assert!((idx.vector("a").unwrap().get("y") - 2f64.ln()).abs() < 1e-11);
    assert!(idx.vector("b").unwrap().is_empty());
    assert_eq!(idx.len(), 2);
}

#[test]
fn query_edge_cases() {
    let mut idx = CorpusIndex::new();
    idx.index_article("b", ConceptVector::from_pairs([("x".into(), 1.0)])).unwrap();
    idx.index_article("a", ConceptVector::from_pairs([("x".into(), 2.0)])).unwrap();
    idx.index_article("c", ConceptVector::from_pairs([("y".into(), 2.0)])).unwrap();
    assert!(idx.query(&ConceptVector::new(), 10).is_empty());
    let q = ConceptVector::from_pairs([("x".into(), 1.0)]);
    let got = idx.query(&q, 10);
    assert_eq!(got, vec![("a".to_string(), 1.0), ("b".to_string(), 1.0)]);
    assert_eq!(idx.query(&q, 1).len(), 1);
    assert!(idx.query(&q, 0).is_empty());
}

#[test]
fn snapshot_roundtrip_and_format() {
    let mut idx = CorpusIndex::new();
    idx.index_article("d1", ConceptVector::from_pairs([("c".into(), 1.0 / 3.0)])).unwrap();
    let json = serde_json::to_string(&idx).unwrap();
    assert_eq!(json, r#"{"N":1,"df":{"c":1},"vectors":{"d1":{"c":0.333333333333}}}"#);
    let back: CorpusIndex = serde_json::from_str(&json).unwrap();
    assert_eq!(back, idx);
    assert!(serde_json::from_str::<CorpusIndex>(r#"{"N":1,"df":{"c":2},"vectors":{"d1":{"c":1.0}}}"#).is_err());
}

#[test]
fn keyword_vectors() {
    let doc = |id: &str, body: &str| Document {
        id: id.into(),
        title: String::new(),
        body: body.into(),
        published_date: NaiveDate::from_ymd_opt(2011, 1, 1).unwrap(),
    };
    assert_eq!(
        keyword_counts(&doc("a", "Banque Banque")),
        BTreeMap::from([("banque".to_string(), 2.0)])
    );
    let empty = doc("e", "");
    assert!(keyword_counts(&empty).is_empty());
    let d1 = doc("1", "Banque Banque");
    let d2 = doc("2", "usine");
    let c1 = keyword_counts(&d1);
    let c2 = keyword_counts(&d2);
    let idx = KeywordIndex::build_batch([("1", &c1), ("2", &c2)]).unwrap();
    let v = keyword_vector(&idx, &d1).unwrap();
    assert!((v.get("banque") - (1.0 + 2f64.ln()) * 2f64.ln()).abs() < 1e-12);
    assert!(keyword_vector(&idx, &empty).unwrap().is_empty());
}

fn random_index(rng: &mut ChaCha8Rng, docs: usize, terms: usize) -> CorpusIndex {
    let mut idx = CorpusIndex::new();
    for d in 0..docs {
        let v: ConceptVector = (0..rng.gen_range(0..6))
            .map(|_| (ConceptId::from(format!("t{}", rng.gen_range(0..terms))), rng.gen_range(0.1..3.0)))
            .collect();
        idx.index_article(&format!("doc{d:03}"), v).unwrap();
    }
    idx
}

#[test]
fn query_matches_full_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let idx = random_index(&mut rng, 120, 25);
        for _ in 0..10 {
            let q: ConceptVector = (0..rng.gen_range(0..4))
                .map(|_| (ConceptId::from(format!("t{}", rng.gen_range(0..25))), rng.gen_range(0.1..3.0)))
                .collect();
            let k = rng.gen_range(0..40);
            let mut full: Vec<(String, f64)> = idx
                .vectors()
                .map(|(d, v)| {
                    let dot: f64 = q.iter().map(|(t, w)| w * v.get(t)).sum();
                    let s = if q.is_empty() || v.is_empty() { 0.0 } else { dot / (q.norm() * v.norm()) };
                    (d.clone(), s.min(1.0))
                })
                .filter(|(_, s)| *s > 0.0)
                .collect();
            full.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            full.truncate(k);
            assert_eq!(idx.query(&q, k), full);
            // scaling the query may only reorder exact ties up to rounding
            let scaled = idx.query(&q.scaled(7.5), k);
            let plain = idx.query(&q, k);
            assert_eq!(scaled.len(), plain.len());
            for ((d1, s1), (_, s2)) in scaled.iter().zip(&plain) {
                assert!((s1 - s2).abs() < 1e-12);
                let own = cosine(&q, idx.vector(d1).unwrap());
                assert!((own - s1).abs() < 1e-12);
            }
        }
        for (t, df) in idx.document_frequencies() {
            let post = idx.postings(t).unwrap();
            assert_eq!(post.len(), *df);
            assert!(post.iter().all(|d| idx.vector(d).unwrap().get(t) > 0.0));
        }
    }
}

fn arb_vector() -> impl Strategy<Value = ConceptVector> {
    prop::collection::btree_map("[a-f]", 0.001f64..100.0, 0..6)
        .prop_map(|m| m.into_iter().map(|(k, w)| (ConceptId::from(k), w)).collect())
}

proptest! {
    #[test]
    fn cosine_symmetric_bounded_scale_invariant(a in arb_vector(), b in arb_vector(), l in 0.01f64..100.0) {
        let ab = cosine(&a, &b);
        prop_assert!((ab - cosine(&b, &a)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((cosine(&a.scaled(l), &b) - ab).abs() < 1e-12);
    }

    #[test]
    fn expansion_mass_bounded_on_trees(parents in prop::collection::vec(0usize..1000, 1..40), decay in 0.05f64..0.95) {
        // concept i>0 hangs under a random earlier concept: a tree
        let mut kb = KnowledgeBase::new();
        for (i, p) in parents.iter().enumerate() {
            let mut c = Concept::new(format!("domain:c{i}"), "c", LayerId::Domain);
            if i > 0 {
                c = c.with_parent(format!("domain:c{}", p % i));
            }
            kb.add_concept(c).unwrap();
        }
        for i in 0..parents.len() {
            let mass: f64 = raw_counts(&[ann(&format!("domain:c{i}"))], &kb, Expansion::with_decay(decay))
                .unwrap()
                .values()
                .sum();
            prop_assert!(mass < 1.0 / (1.0 - decay));
        }
    }
}
