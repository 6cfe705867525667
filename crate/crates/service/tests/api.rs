mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use common::*;
use http_body_util::BodyExt;
use ontorec::recommend::generate_review;
use ontorec_service::api::{router, Service};
use ontorec_service::Store;
use serde_json::{json, Value};
use tower::ServiceExt;

const DATE: &str = "2011-01-12";

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req
            .header("content-type", "application/json")
            .body(Body::from(serde_json::to_vec(&v).unwrap())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (s, b) = call(app, Method::GET, uri, None).await;
    (s, serde_json::from_slice(&b).unwrap())
}

/// A store holding the first 40 fixture articles and two profiles.
fn seeded() -> (tempfile::TempDir, Arc<Service>, Router) {
    let (dir, mut store) = fresh();
    for d in &corpus100()[..40] {
        store.ingest(d.clone()).unwrap();
    }
    store.set_profile("u1", profile_req(&["domain:CompanyTakeover", "domain:Wine"]), at(0)).unwrap();
    store.set_profile("u2", profile_req(&["domain:City"]), at(0)).unwrap();
    let service = Service::new(store);
    let app = router(Arc::clone(&service));
    (dir, service, app)
}

#[tokio::test]
async fn review_is_generate_review() {
    let (_dir, service, app) = seeded();
    let (status, body) = call(&app, Method::GET, &format!("/users/u1/review?date={DATE}"), None).await;
    assert_eq!(status, StatusCode::OK);

    let state = service.snapshot();
    let profile = state.profile("u1").unwrap();
    let daily = state.articles.values().filter(|a| a.doc.published_date == day(DATE)).map(|a| a.doc.id.as_str());
    let direct = generate_review(profile, day(DATE), daily, &state.index, state.config.k, state.config.theta).unwrap();
    assert!(!direct.items.is_empty());
    let direct = direct.with_titles(|id| state.articles.get(id).map(|a| a.doc.title.clone()));
    assert_eq!(body, serde_json::to_vec(&direct).unwrap());
    let body: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(body["userId"], "u1");
    assert_eq!(body["date"], DATE);
    assert_eq!(body["items"][0]["title"], state.article(&direct.items[0].article_id).unwrap().doc.title.as_str());
}

fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn weights(v: &Value) -> BTreeMap<String, f64> {
    serde_json::from_value(v.clone()).unwrap()
}

#[tokio::test]
async fn feedback_moves_the_review_like_the_offline_recomputation() {
    let (_dir, service, app) = seeded();
    let before = service.snapshot();
    let (_, profile) = get(&app, "/users/u2/profile").await;
    let p = weights(&profile["vector"]);

    // rate the day's lowest-ranked article up
    let (_, review) = get(&app, &format!("/users/u2/review?date={DATE}")).await;
    let target = review["items"].as_array().unwrap().last().unwrap()["articleId"].as_str().unwrap().to_owned();
    let v: BTreeMap<String, f64> =
        before.index.vector(&target).unwrap().iter().map(|(k, w)| (k.to_string(), w)).collect();

    let alpha = before.config.alpha;
    let vn = v.values().map(|x| x * x).sum::<f64>().sqrt();
    let mut blended: BTreeMap<String, f64> = BTreeMap::new();
    for (k, w) in &p {
        *blended.entry(k.clone()).or_default() += (1.0 - alpha) * w;
    }
    for (k, w) in &v {
        *blended.entry(k.clone()).or_default() += alpha * w / vn;
    }
    let bn = blended.values().map(|x| x * x).sum::<f64>().sqrt();
    let expected: BTreeMap<String, f64> = blended.into_iter().map(|(k, w)| (k, w / bn)).collect();

    let fb = json!({"articleId": target, "kind": "explicit", "rating": 1, "timestamp": "2011-01-12T09:00:00Z"});
    let (status, body) = call(&app, Method::POST, "/users/u2/feedback", Some(fb)).await;
    assert_eq!(status, StatusCode::OK);
    let updated: Value = serde_json::from_slice(&body).unwrap();
    let got = weights(&updated["vector"]);
    assert_eq!(got.keys().collect::<Vec<_>>(), expected.keys().collect::<Vec<_>>());
    for (k, w) in &expected {
        assert!((got[k] - w).abs() < 1e-12, "{k}");
    }
    assert!(cosine(&got, &v) >= cosine(&p, &v));

    let mut oracle: Vec<(String, f64)> = before
        .articles
        .values()
        .filter(|a| a.doc.published_date == day(DATE))
        .map(|a| {
            let d: BTreeMap<String, f64> =
                before.index.vector(&a.doc.id).unwrap().iter().map(|(k, w)| (k.to_string(), w)).collect();
            (a.doc.id.clone(), cosine(&expected, &d))
        })
        .filter(|(_, s)| *s >= before.config.theta)
        .collect();
    oracle.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    oracle.truncate(before.config.k);

    let (_, after) = get(&app, &format!("/users/u2/review?date={DATE}")).await;
    let items = after["items"].as_array().unwrap();
    assert_eq!(
        items.iter().map(|i| i["articleId"].as_str().unwrap()).collect::<Vec<_>>(),
        oracle.iter().map(|(d, _)| d.as_str()).collect::<Vec<_>>()
    );
    for (i, (_, s)) in items.iter().zip(&oracle) {
        assert!((i["score"].as_f64().unwrap() - s).abs() < 1e-9);
    }
    let old = review["items"].as_array().unwrap().iter().find(|i| i["articleId"] == target.as_str()).unwrap();
    let new = items.iter().find(|i| i["articleId"] == target.as_str()).unwrap();
    assert!(new["score"].as_f64().unwrap() > old["score"].as_f64().unwrap());
}

#[tokio::test]
async fn unknown_resources_are_404_objects() {
    let (_dir, _service, app) = seeded();
    for uri in [
        "/articles/unknown/annotations",
        "/articles/unknown",
        "/users/nobody/profile",
        "/users/nobody/alerts",
        "/users/nobody/review?date=2011-01-12",
        "/concepts/domain:Nothing/digest",
        "/ontology/mystery",
        "/no/such/route",
    ] {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{uri}");
        assert_eq!(body["code"], "NotFound", "{uri}");
        assert!(body["message"].as_str().is_some_and(|m| !m.is_empty()), "{uri}");
    }
}

#[tokio::test]
async fn gets_repeat_byte_for_byte() {
    let (_dir, _service, app) = seeded();
    let uris = [
        "/articles/art005",
        "/articles/art005/annotations",
        "/users/u1/profile",
        "/users/u1/review?date=2011-01-12",
        "/users/u1/alerts",
        "/concepts/domain:Company/digest",
        "/ontology/upper",
        "/ontology/domain",
        "/ontology/lexical",
        "/ontology/corpus",
    ];
    for uri in uris {
        let (s1, first) = call(&app, Method::GET, uri, None).await;
        let (s2, second) = call(&app, Method::GET, uri, None).await;
        assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK), "{uri}");
        assert_eq!(first, second, "{uri}");
    }
}

#[tokio::test]
async fn articles_round_trip() {
    let (_dir, service, app) = seeded();
    let (status, _) = call(&app, Method::PUT, "/users/u3/profile", Some(json!({"seeds": ["domain:Company"]}))).await;
    assert_eq!(status, StatusCode::OK);
    let article = json!({"id": "x1", "title": "Rachat", "body": "Rachat de Cuisines Bresse SAS à Mâcon.", "publishedDate": "2011-01-12"});
    let (status, body) = call(&app, Method::POST, "/articles", Some(article.clone())).await;
    assert_eq!(status, StatusCode::CREATED);
    let report: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(report["indexN"], 41);
    assert_eq!(report["newIndividuals"], json!(["domain:cuisines_bresse_sas"]));
    let (_, got) = get(&app, "/articles/x1").await;
    assert_eq!(got, article);
    let (_, anns) = get(&app, "/articles/x1/annotations").await;
    assert_eq!(anns, serde_json::to_value(service.snapshot().article_annotations("x1").unwrap()).unwrap());

    let (status, body) = call(&app, Method::POST, "/articles", Some(article)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["code"], "DuplicateArticle");

    let (_, alerts) = get(&app, "/users/u3/alerts").await;
    assert!(alerts.as_array().unwrap().iter().any(|a| a["individualId"] == "domain:cuisines_bresse_sas"
        && a["triggeringArticleId"] == "x1"));
    let (_, alerts) = get(&app, "/users/u2/alerts").await;
    assert!(alerts.as_array().unwrap().iter().all(|a| a["triggeringArticleId"] != "x1"));
}

#[tokio::test]
async fn malformed_requests_are_schema_errors() {
    let (_dir, _service, app) = seeded();
    let cases: Vec<(Method, &str, Option<Value>)> = vec![
        (Method::POST, "/articles", Some(json!({"id": "x"}))),
        (Method::POST, "/articles", Some(json!({"id": "x", "title": "t", "body": "b", "publishedDate": "12/01/2011"}))),
        (Method::POST, "/users/u1/feedback", Some(json!({"kind": "opened"}))),
        (Method::PUT, "/users/u3/profile", Some(json!({"seeds": "domain:City"}))),
        (Method::GET, "/users/u1/review", None),
        (Method::GET, "/users/u1/review?date=yesterday", None),
        (Method::POST, "/ontology/domain", Some(json!({"concepts": []}))),
    ];
    for (method, uri, body) in cases {
        let (status, bytes) = call(&app, method.clone(), uri, body).await;
        let body: Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(status, StatusCode::BAD_REQUEST, "{method} {uri}");
        assert_eq!(body["code"], "SchemaError", "{method} {uri}");
    }
    let (status, bytes) = call(&app, Method::POST, "/articles", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(serde_json::from_slice::<Value>(&bytes).unwrap()["code"], "SchemaError");
}

#[tokio::test]
async fn profiles_are_created_over_http() {
    let (_dir, _service, app) = seeded();
    let (status, body) = call(&app, Method::PUT, "/users/u3/profile", Some(json!({"seeds": ["domain:Telecom", "domain:Energy"]}))).await;
    assert_eq!(status, StatusCode::OK);
    let p: Value = serde_json::from_slice(&body).unwrap();
    let w = weights(&p["vector"]);
    assert_eq!(w.len(), 2);
    assert!((w["domain:Telecom"] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    let (_, fetched) = get(&app, "/users/u3/profile").await;
    assert_eq!(fetched, p);

    let (status, body) = call(&app, Method::PUT, "/users/u4/profile", Some(json!({"seeds": []}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["code"], "EmptySeeds");
    let (_, body) = call(&app, Method::PUT, "/users/u4/profile", Some(json!({"seeds": ["domain:Nope"]}))).await;
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["code"], "UnknownConcept");
}

#[tokio::test]
async fn ontology_layers_and_domain_swap() {
    let (_dir, service, app) = seeded();
    for layer in ["upper", "domain", "lexical", "corpus"] {
        let (_, body) = call(&app, Method::GET, &format!("/ontology/{layer}"), None).await;
        let want = service.snapshot().layer(layer).unwrap();
        assert_eq!(serde_json::from_slice::<Value>(&body).unwrap(), serde_json::to_value(&want).unwrap());
    }
    let (status, _) = call(&app, Method::POST, "/ontology/upper", Some(json!({"layer": "upper"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (_, domain) = get(&app, "/ontology/domain").await;
    let (status, body) = call(&app, Method::POST, "/ontology/domain", Some(domain.clone())).await;
    assert_eq!(status, StatusCode::OK);
    let report: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(report, json!({"lexicalEntries": [], "annotations": [], "assertions": [], "removedIds": []}));

    let mut pruned = domain.clone();
    pruned["concepts"].as_array_mut().unwrap().retain(|c| c["id"] != "domain:HighSpeedRail");
    let (status, body) = call(&app, Method::POST, "/ontology/domain", Some(pruned)).await;
    assert_eq!(status, StatusCode::OK);
    let report: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(report["removedIds"], json!(["domain:HighSpeedRail"]));
    assert_eq!(report["lexicalEntries"].as_array().unwrap().len(), 3);

    let mut broken = domain;
    broken["layer"] = json!("corpus");
    let (status, body) = call(&app, Method::POST, "/ontology/domain", Some(broken)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["code"], "InvalidDomainLayer");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn reads_proceed_during_ingest() {
    let (_dir, service, app) = seeded();
    let writer = {
        let app = app.clone();
        tokio::spawn(async move {
            for d in &corpus100()[40..60] {
                let (status, _) = call(&app, Method::POST, "/articles", Some(serde_json::to_value(d).unwrap())).await;
                assert_eq!(status, StatusCode::CREATED);
            }
        })
    };
    let mut readers = Vec::new();
    for _ in 0..4 {
        let app = app.clone();
        readers.push(tokio::spawn(async move {
            for _ in 0..25 {
                let (status, body) = get(&app, "/users/u1/review?date=2011-01-12").await;
                assert_eq!(status, StatusCode::OK);
                assert!(body["items"].is_array());
            }
        }));
    }
    writer.await.unwrap();
    for r in readers {
        r.await.unwrap();
    }
    assert_eq!(service.snapshot().index.len(), 60);
    let reopened = Store::open(_dir.path().join("store")).unwrap();
    assert!(reopened.state().check().is_empty());
}
