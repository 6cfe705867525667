use std::collections::BTreeSet;

use chrono::{TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::extract::{Source, Span};
use crate::fixtures;
use crate::kbase::{Individual, LayerId};
use crate::profile::init_profile;

fn day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2011, 1, 12).unwrap()
}

fn profile_with(pairs: &[(&str, f64)]) -> Profile {
    let kb = fixtures::knowledge_base();
    let mut p = init_profile("u1", ["domain:Company".into()], &kb, Utc.timestamp_opt(0, 0).unwrap()).unwrap();
    p.vector = pairs.iter().map(|(k, w)| (ConceptId::from(*k), *w)).collect();
    p
}

fn vector(pairs: &[(&str, f64)]) -> ConceptVector {
    pairs.iter().map(|(k, w)| (ConceptId::from(*k), *w)).collect()
}

#[test]
fn score_examples() {
    let h = 0.5f64.sqrt();
    let p = profile_with(&[("a", h), ("b", h)]);
    assert!((score(&p, &vector(&[("a", 3.0)])) - h).abs() < 1e-12);
    assert!((score(&p, &vector(&[("a", 3.0)])) - 0.70711).abs() < 1e-5);
    assert!((score(&p, &p.vector.scaled(4.0)) - 1.0).abs() < 1e-12);
    assert_eq!(score(&p, &vector(&[("c", 1.0)])), 0.0);
}

fn small_index() -> CorpusIndex {
    let mut idx = CorpusIndex::new();
    idx.index_article("b", vector(&[("x", 1.0)])).unwrap();
    idx.index_article("a", vector(&[("x", 2.0)])).unwrap();
    idx.index_article("c", vector(&[("x", 1.0), ("y", 1.0)])).unwrap();
    idx.index_article("d", vector(&[("y", 1.0)])).unwrap();
    idx
}

#[test]
fn review_threshold_ties_and_errors() {
    let idx = small_index();
    let p = profile_with(&[("x", 1.0)]);
    let all = ["a", "b", "c", "d"];
    let r = generate_review(&p, day(), all, &idx, 10, 0.05).unwrap();
    let ids: Vec<_> = r.items.iter().map(|i| i.article_id.as_str()).collect();
    assert_eq!(ids, ["a", "b", "c"]);
    assert!(generate_review(&p, day(), all, &idx, 10, 0.99).unwrap().items.len() == 2);
    let none = generate_review(&profile_with(&[("z", 1.0)]), day(), all, &idx, 10, 0.05).unwrap();
    assert!(none.items.is_empty());
    assert_eq!(generate_review(&p, day(), all, &idx, 1, 0.05).unwrap().items.len(), 1);
    assert_eq!(
        generate_review(&p, day(), ["a", "zz"], &idx, 10, 0.05),
        Err(RecommendError::UnknownDoc("zz".into()))
    );
    let json = serde_json::to_string(&r.clone().with_titles(|id| Some(id.to_uppercase()))).unwrap();
    assert!(json.starts_with(r#"{"userId":"u1","date":"2011-01-12","items":[{"articleId":"a","score":1.0,"title":"A"}"#));
}

fn brute_force(p: &ConceptVector, docs: &[(String, ConceptVector)], k: usize, theta: f64) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = docs
        .iter()
        .map(|(d, v)| {
            let dot: f64 = p.iter().map(|(t, w)| w * v.get(t)).sum();
            let s = if p.is_empty() || v.is_empty() { 0.0 } else { (dot / (p.norm() * v.norm())).clamp(0.0, 1.0) };
            (d.clone(), s)
        })
        .filter(|(_, s)| *s >= theta)
        .collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    out.truncate(k);
    out
}

#[test]
fn review_matches_full_scan_and_is_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let random_vector = |rng: &mut ChaCha8Rng| -> ConceptVector {
        (0..rng.gen_range(0..5))
            .map(|_| (ConceptId::from(format!("t{}", rng.gen_range(0..15))), rng.gen_range(1..4) as f64))
            .collect()
    };
    for _ in 0..10 {
        let docs: Vec<(String, ConceptVector)> =
            (0..rng.gen_range(1..200)).map(|i| (format!("d{i:03}"), random_vector(&mut rng))).collect();
        let mut idx = CorpusIndex::new();
        for (d, v) in &docs {
            idx.index_article(d, v.clone()).unwrap();
        }
        for _ in 0..20 {
            let mut p = profile_with(&[]);
            p.vector = random_vector(&mut rng).normalized();
            let k = rng.gen_range(0..30);
            let theta = [0.0, 0.05, 0.3, 0.7][rng.gen_range(0..4)];
            let daily: Vec<(String, ConceptVector)> =
                docs.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
            let r = generate_review(&p, day(), daily.iter().map(|(d, _)| d.as_str()), &idx, k, theta).unwrap();
            let got: Vec<(String, f64)> = r.items.iter().map(|i| (i.article_id.clone(), i.score)).collect();
            assert_eq!(got, brute_force(&p.vector, &daily, k, theta));
            assert!(got.iter().all(|(_, s)| *s >= theta) && got.len() <= k);
            let again = generate_review(&p, day(), daily.iter().map(|(d, _)| d.as_str()), &idx, k, theta).unwrap();
            assert_eq!(serde_json::to_string(&again).unwrap(), serde_json::to_string(&r).unwrap());
            // integer weights keep exact ties exact under power-of-two scaling
            let mut scaled = p.clone();
            scaled.vector = p.vector.scaled(4.0);
            let rs = generate_review(&scaled, day(), daily.iter().map(|(d, _)| d.as_str()), &idx, k, theta).unwrap();
            let ids = |r: &Review| r.items.iter().map(|i| i.article_id.clone()).collect::<Vec<_>>();
            assert_eq!(ids(&rs), ids(&r));
        }
    }
}

#[test]
fn alert_examples() {
    let mut kb = fixtures::knowledge_base();
    kb.add_individual(Individual::new("domain:nexidia", "Nexidia SARL", "domain:Company", LayerId::Domain))
        .unwrap();
    let new = vec![IndividualId::from("domain:nexidia")];
    let p = profile_with(&[("domain:Company", 0.8), ("domain:City", 0.6)]);
    let alerts = detect_alerts(&kb, &new, &p, 0.5, "a1", day()).unwrap();
    assert_eq!(
        alerts,
        vec![Alert {
            user_id: "u1".into(),
            individual_id: "domain:nexidia".into(),
            concept: "domain:Company".into(),
            triggering_article_id: "a1".into(),
            date: day(),
        }]
    );
    let weak = profile_with(&[("domain:Company", 0.2), ("domain:City", 0.98)]);
    assert!(detect_alerts(&kb, &new, &weak, 0.5, "a1", day()).unwrap().is_empty());
    // ancestor-aware: weight on Organization reaches a Company individual
    let broad = profile_with(&[("upper:Organization", 1.0)]);
    assert_eq!(detect_alerts(&kb, &new, &broad, 0.3, "a1", day()).unwrap().len(), 1);
    assert!(detect_alerts(&kb, &[], &p, 0.5, "a1", day()).unwrap().is_empty());

    let mut log = AlertLog::new();
    assert_eq!(log.admit(alerts.clone()).len(), 1);
    assert!(log.admit(alerts.clone()).is_empty());
    let lines: String = log.for_user("u1").map(|a| serde_json::to_string(a).unwrap() + "\n").collect();
    assert_eq!(AlertLog::from_json_lines(&lines).unwrap(), log);
}

#[test]
fn relevance_sums_over_types() {
    let mut kb = fixtures::knowledge_base();
    let mut ind = Individual::new("domain:x", "X", "domain:Bank", LayerId::Domain);
    ind.types.push("domain:City".into());
    kb.add_individual(ind).unwrap();
    let p = profile_with(&[("domain:Company", 0.25), ("upper:Organization", 0.5), ("domain:City", 0.2)]);
    assert!((relevance(&kb, &"domain:x".into(), &p).unwrap() - 0.7).abs() < 1e-12);
}

fn link(doc: &str, individual: &str) -> Annotation {
    Annotation {
        doc_id: doc.into(),
        span: Span::new(0, 1),
        concept: "domain:Company".into(),
        individual: Some(individual.into()),
        source: Source::Gazetteer,
        rule_name: None,
        normalized_value: None,
    }
}

#[test]
fn digest_examples_and_oracles() {
    let mut kb = fixtures::knowledge_base();
    kb.add_individual(Individual::new("domain:acme", "Acme", "domain:Bank", LayerId::Domain)).unwrap();
    kb.assert_relation(crate::kbase::Assertion::link("domain:acme", "domain:locatedIn", "domain:dijon"))
        .unwrap();
    let store: Vec<(String, Vec<Annotation>)> = vec![
        ("a1".into(), vec![link("a1", "domain:acme")]),
        ("a2".into(), vec![link("a2", "domain:dijon")]),
        ("a3".into(), vec![link("a3", "domain:amora"), link("a3", "domain:dijon")]),
        ("a4".into(), vec![]),
    ];
    let view = || store.iter().map(|(d, a)| (d.as_str(), a.as_slice()));
    let d = knowledge_digest(&kb, view(), "domain:Company").unwrap();

    let expected_inds = kb.instances_of("domain:Company", true).unwrap();
    assert_eq!(d.individuals.iter().cloned().collect::<BTreeSet<_>>(), expected_inds);
    assert!(d.individuals.contains(&"domain:acme".into()));
    assert!(d
        .assertions
        .iter()
        .any(|a| a.subject == "domain:acme" && a.property == "domain:locatedIn"));
    let expected_assertions = kb.assertions().filter(|a| expected_inds.contains(&a.subject)).count();
    assert_eq!(d.assertions.len(), expected_assertions);
    let mut union = BTreeSet::new();
    for ind in &expected_inds {
        for (doc, anns) in &store {
            if anns.iter().any(|a| a.individual.as_ref() == Some(ind)) {
                union.insert(doc.clone());
            }
        }
    }
    assert_eq!(d.supporting_articles, union);
    assert_eq!(union, BTreeSet::from(["a1".to_string(), "a3".to_string()]));

    let empty = knowledge_digest(&kb, view(), "domain:HighSpeedRail").unwrap();
    assert!(empty.individuals.is_empty() && empty.assertions.is_empty() && empty.supporting_articles.is_empty());
    assert!(matches!(
        knowledge_digest(&kb, view(), "domain:Nope"),
        Err(RecommendError::Kb(KbError::UnknownId(_)))
    ));
}
