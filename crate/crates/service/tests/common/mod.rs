#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, TimeZone, Utc};
use ontorec::extract::Document;
use ontorec_service::{InitOptions, ProfileRequest, Store};
use tempfile::TempDir;

pub const CORPUS100: &str = include_str!("../data/corpus100.json");
pub const GOLDEN_INGEST: &str = include_str!("../data/golden_ingest.json");

pub fn corpus100() -> Vec<Document> {
    serde_json::from_str(CORPUS100).expect("corpus fixture parses")
}

pub fn doc(id: &str, title: &str, body: &str, date: &str) -> Document {
    Document {
        id: id.into(),
        title: title.into(),
        body: body.into(),
        published_date: date.parse().expect("date"),
    }
}

pub fn day(s: &str) -> NaiveDate {
    s.parse().expect("date")
}

pub fn at(secs: i64) -> DateTime<Utc> {
    Utc.timestamp_opt(1_294_000_000 + secs, 0).unwrap()
}

pub fn fresh() -> (TempDir, Store) {
    let dir = TempDir::new().unwrap();
    let store = Store::init(dir.path().join("store"), InitOptions::default()).unwrap();
    (dir, store)
}

pub fn profile_req(seeds: &[&str]) -> ProfileRequest {
    ProfileRequest {
        seeds: seeds.iter().map(|s| (*s).into()).collect(),
        created_at: Some(at(0)),
    }
}

/// Every file under `root` with its bytes, keyed by relative path.
pub fn snapshot_files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Two articles name a takeover with different words; the others are off topic.
pub fn synonym_corpus() -> Vec<Document> {
    vec![
        doc("s1", "Cave", "Rachat de la fromagerie par une cave.", "2011-01-10"),
        doc("s2", "Cave", "Acquisition de la fromagerie par une cave.", "2011-01-10"),
        doc("s3", "Transport", "Le tramway arrive en ville.", "2011-01-10"),
        doc("s4", "Réseau", "La fibre optique progresse en ville.", "2011-01-10"),
    ]
}

/// "plan" means a layoff plan in p1 and a route map in p2.
pub fn polysemy_corpus() -> Vec<Document> {
    vec![
        doc("p1", "Social", "Un plan social chez Amora.", "2011-01-10"),
        doc("p2", "Transport", "Le plan du tramway de Dijon.", "2011-01-10"),
        doc("p3", "Réseau", "La fibre optique à Beaune.", "2011-01-10"),
        doc("p4", "Vigne", "Les vendanges à Mâcon.", "2011-01-10"),
    ]
}

pub fn store_with(docs: &[Document]) -> (TempDir, Store) {
    let (dir, mut store) = fresh();
    for d in docs {
        store.ingest(d.clone()).unwrap();
    }
    (dir, store)
}

pub fn eval_spec(k: usize, cases: &[(&str, &str, &[&str])]) -> ontorec_service::EvalSpec {
    let cases: Vec<serde_json::Value> = cases
        .iter()
        .map(|(name, query, relevant)| serde_json::json!({"name": name, "query": query, "relevant": relevant}))
        .collect();
    serde_json::from_value(serde_json::json!({"k": k, "cases": cases})).unwrap()
}
