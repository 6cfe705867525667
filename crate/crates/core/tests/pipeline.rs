use chrono::{NaiveDate, TimeZone, Utc};
use ontorec::extract::{populate, Document, Extractor};
use ontorec::fixtures;
use ontorec::index::{cosine, keyword_counts, raw_counts, tfidf, CorpusIndex, Expansion, KeywordIndex};
use ontorec::profile::{apply_feedback, init_profile, FeedbackEvent, FeedbackKind};
use ontorec::recommend::{detect_alerts, generate_review, knowledge_digest};

fn doc(id: &str, body: &str) -> Document {
    Document {
        id: id.into(),
        title: String::new(),
        body: body.into(),
        published_date: NaiveDate::from_ymd_opt(2011, 1, 12).unwrap(),
    }
}

#[test]
fn synonyms_share_concepts_but_not_words() {
    let kb = fixtures::knowledge_base();
    let extractor = Extractor::new(&kb, &fixtures::lexicon(), &fixtures::rules()).unwrap();
    let docs = [doc("a", "Rachat signé."), doc("b", "Acquisition conclue."), doc("c", "Vendanges tardives.")];

    let concept_counts: Vec<_> = docs
        .iter()
        .map(|d| raw_counts(&extractor.annotate(d), &kb, Expansion::off()).unwrap())
        .collect();
    let concepts = CorpusIndex::build_batch(docs.iter().map(|d| d.id.as_str()).zip(&concept_counts)).unwrap();
    let word_counts: Vec<_> = docs.iter().map(keyword_counts).collect();
    let words = KeywordIndex::build_batch(docs.iter().map(|d| d.id.as_str()).zip(&word_counts)).unwrap();

    let kw = |i: usize| tfidf(&words, &word_counts[i]).unwrap();
    let cv = |i: usize| tfidf(&concepts, &concept_counts[i]).unwrap();
    assert_eq!(cosine(&kw(0), &kw(1)), 0.0);
    assert!(cosine(&cv(0), &cv(1)) > 0.0);
    assert_eq!(cosine(&cv(0), &cv(2)), 0.0);
}

#[test]
fn article_to_review_to_alert() {
    let mut kb = fixtures::knowledge_base();
    let mut lexicon = fixtures::lexicon();
    let extractor = Extractor::new(&kb, &lexicon, &fixtures::rules()).unwrap();
    let now = Utc.with_ymd_and_hms(2011, 1, 12, 8, 0, 0).unwrap();
    let profile = init_profile("u1", ["domain:Company".into(), "domain:Wine".into()], &kb, now).unwrap();

    let articles = [
        doc("a1", "Rachat de Vignes Chablis SAS par un vignoble de Beaune."),
        doc("a2", "Le tramway de Dijon ouvre une nouvelle ligne."),
        doc("a3", "Les vendanges commencent en Bourgogne."),
    ];
    let mut index = CorpusIndex::new();
    let mut stored = Vec::new();
    let mut alerts = Vec::new();
    for a in &articles {
        let mut anns = extractor.annotate(a);
        let pop = populate(&mut kb, &mut lexicon, &extractor.rules, &a.full_text(), &mut anns).unwrap();
        let counts = raw_counts(&anns, &kb, Expansion::with_decay(0.5)).unwrap();
        index.add_counts(&a.id, &counts).unwrap();
        alerts.extend(detect_alerts(&kb, &pop.new_individuals, &profile, 0.3, &a.id, a.published_date).unwrap());
        stored.push((a.id.clone(), anns));
    }
    assert_eq!(index.len(), 3);
    assert_eq!(alerts.len(), 1);
    assert_eq!(alerts[0].individual_id.as_str(), "domain:vignes_chablis_sas");
    assert!(kb.individual("domain:vignes_chablis_sas").is_some());
    assert_eq!(lexicon.last().unwrap().surface, "Vignes Chablis SAS");

    let day = articles[0].published_date;
    let review = generate_review(&profile, day, ["a1", "a2", "a3"], &index, 20, 0.05).unwrap();
    let order: Vec<&str> = review.items.iter().map(|i| i.article_id.as_str()).collect();
    assert!(!order.contains(&"a2"), "{order:?}");

    let event = FeedbackEvent {
        user_id: "u1".into(),
        article_id: "a3".into(),
        kind: FeedbackKind::Explicit(1),
        timestamp: now,
    };
    let updated = apply_feedback(&profile, event, index.vector("a3").unwrap(), 1.0, 0.3).unwrap();
    let before = review.items.iter().find(|i| i.article_id == "a3").map_or(0.0, |i| i.score);
    let after = generate_review(&updated, day, ["a1", "a2", "a3"], &index, 20, 0.05).unwrap();
    let after = after.items.iter().find(|i| i.article_id == "a3").unwrap().score;
    assert!(after > before);

    let view = stored.iter().map(|(d, a)| (d.as_str(), a.as_slice()));
    let digest = knowledge_digest(&kb, view, "domain:Company").unwrap();
    assert!(digest.individuals.iter().any(|i| i.as_str() == "domain:vignes_chablis_sas"));
    assert!(digest.supporting_articles.contains("a1"));
}
