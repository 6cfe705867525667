//! The on-disk store and the ingest, feedback and ontology workflows.
//!
//! Layout under the root directory:
//!
//! ```text
//! config.json
//! ontology/{upper,domain,lexical,corpus}.json
//! lexicon.json
//! rules.json
//! articles/<id>.json
//! annotations/<id>.jsonl
//! index.json
//! profiles/<user>.json
//! alerts.log
//! ```
//!
//! Every write goes through a [`Txn`]: files are staged under `.pending/`,
//! a `COMMIT` marker is written, then the files are renamed into place.
//! Opening a store finishes a committed transaction and discards an
//! uncommitted one.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, Utc};
use ontorec::extract::{
    external_refs, populate, Annotation, Document, Extractor, LexicalEntry, PatternRule,
};
use ontorec::fixtures;
use ontorec::index::{raw_counts, CorpusIndex};
use ontorec::kbase::{
    Assertion, ConceptId, DanglingReport, Datatype, Individual, IndividualId, KbError,
    KnowledgeBase, LayerDoc, LayerId, Violation,
};
use ontorec::profile::{
    apply_feedback, init_profile, signal_strength, FeedbackEvent, FeedbackKind, HistoryEntry,
    Profile,
};
use ontorec::recommend::{
    detect_alerts, generate_review, knowledge_digest, Alert, AlertLog, Digest, Review,
};
use ontorec::vocab;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Result, ServiceError};

const PENDING: &str = ".pending";
const MANIFEST: &str = "MANIFEST";
const COMMIT: &str = "COMMIT";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StoredArticle {
    #[serde(flatten)]
    pub doc: Document,
    /// Ingestion order, used when replaying the store.
    pub seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IngestReport {
    pub annotations: usize,
    pub new_individuals: Vec<IndividualId>,
    #[serde(rename = "indexN")]
    pub index_n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FeedbackRequest {
    pub article_id: String,
    pub kind: String,
    #[serde(default)]
    pub rating: Option<i64>,
    #[serde(default)]
    pub timestamp: Option<DateTime<Utc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProfileRequest {
    pub seeds: Vec<ConceptId>,
    #[serde(default)]
    pub created_at: Option<DateTime<Utc>>,
}

/// Initial content of a new store.
#[derive(Clone, Debug)]
pub struct InitOptions {
    pub layers: Vec<LayerDoc>,
    pub lexicon: Vec<LexicalEntry>,
    pub rules: Vec<PatternRule>,
    pub config: Config,
}

impl Default for InitOptions {
    fn default() -> Self {
        InitOptions {
            layers: fixtures::layers(),
            lexicon: fixtures::lexicon(),
            rules: fixtures::rules(),
            config: Config::default(),
        }
    }
}

/// Simulated crash points for recovery tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailPoint {
    /// Stop after staging the files, before the commit marker.
    BeforeCommit,
    /// Stop after moving this many staged files into place.
    AfterApplying(usize),
}

/// A set of whole-file writes applied all or nothing.
#[derive(Default, Debug)]
pub struct Txn {
    writes: BTreeMap<String, Vec<u8>>,
}

impl Txn {
    pub fn put(&mut self, rel: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.writes.insert(rel.into(), bytes.into());
    }

    pub fn put_json<T: Serialize>(&mut self, rel: impl Into<String>, value: &T) {
        let mut text = serde_json::to_string_pretty(value).expect("store values serialize");
        text.push('\n');
        self.put(rel, text);
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.writes.keys().map(String::as_str)
    }

    fn commit(self, root: &Path, fail: Option<FailPoint>) -> Result<()> {
        let pending = root.join(PENDING);
        if pending.exists() {
            fs::remove_dir_all(&pending).map_err(|e| ServiceError::io(&pending, e))?;
        }
        let files = pending.join("files");
        for (rel, bytes) in &self.writes {
            let path = files.join(rel);
            create_parent(&path)?;
            fs::write(&path, bytes).map_err(|e| ServiceError::io(&path, e))?;
        }
        let manifest: Vec<&String> = self.writes.keys().collect();
        let manifest_path = pending.join(MANIFEST);
        fs::write(&manifest_path, serde_json::to_vec(&manifest).expect("manifest serializes"))
            .map_err(|e| ServiceError::io(&manifest_path, e))?;
        if fail == Some(FailPoint::BeforeCommit) {
            return Err(ServiceError::InjectedFailure("before commit"));
        }
        let marker = pending.join(COMMIT);
        let tmp = pending.join("COMMIT.tmp");
        fs::write(&tmp, b"").map_err(|e| ServiceError::io(&tmp, e))?;
        fs::rename(&tmp, &marker).map_err(|e| ServiceError::io(&marker, e))?;
        apply_pending(root, fail)
    }
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| ServiceError::io(parent, e))?;
    }
    Ok(())
}

fn apply_pending(root: &Path, fail: Option<FailPoint>) -> Result<()> {
    let pending = root.join(PENDING);
    let manifest_path = pending.join(MANIFEST);
    let manifest: Vec<String> = serde_json::from_slice(
        &fs::read(&manifest_path).map_err(|e| ServiceError::io(&manifest_path, e))?,
    )
    .map_err(|e| ServiceError::SchemaError(format!("{}: {e}", manifest_path.display())))?;
    for (n, rel) in manifest.iter().enumerate() {
        if fail == Some(FailPoint::AfterApplying(n)) {
            return Err(ServiceError::InjectedFailure("while applying"));
        }
        let staged = pending.join("files").join(rel);
        if !staged.exists() {
            // moved before an interruption
            continue;
        }
        let target = root.join(rel);
        create_parent(&target)?;
        fs::rename(&staged, &target).map_err(|e| ServiceError::io(&target, e))?;
    }
    fs::remove_dir_all(&pending).map_err(|e| ServiceError::io(&pending, e))
}

/// Finish or discard an interrupted transaction.
pub fn recover(root: &Path) -> Result<()> {
    let pending = root.join(PENDING);
    if !pending.exists() {
        return Ok(());
    }
    if pending.join(COMMIT).exists() {
        apply_pending(root, None)
    } else {
        fs::remove_dir_all(&pending).map_err(|e| ServiceError::io(&pending, e))
    }
}

/// Article and user ids double as file names.
pub fn check_id(kind: &str, id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(ServiceError::SchemaError(format!(
            "{kind} id {id:?} must be 1-128 characters from [A-Za-z0-9._-] and not start with '.'"
        )))
    }
}

fn layer_path(layer: LayerId) -> String {
    format!("ontology/{}.json", layer.name())
}

fn article_path(id: &str) -> String {
    format!("articles/{id}.json")
}

fn annotations_path(id: &str) -> String {
    format!("annotations/{id}.jsonl")
}

fn profile_path(user: &str) -> String {
    format!("profiles/{user}.json")
}

fn json_lines<T: Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| serde_json::to_string(i).expect("store values serialize") + "\n")
        .collect()
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("store values serialize") + "\n"
}

/// Compile the extractor from the lexicon entries and rules that still
/// resolve; entries left dangling by a domain swap are kept on disk but
/// inactive.
pub fn build_extractor(
    kb: &KnowledgeBase,
    lexicon: &[LexicalEntry],
    rules: &[PatternRule],
) -> Result<Extractor> {
    let resolves = |t: &str| kb.concept(t).is_some() || kb.individual(t).is_some();
    let lexicon: Vec<LexicalEntry> = lexicon.iter().filter(|e| resolves(&e.target)).cloned().collect();
    let rules: Vec<PatternRule> = rules
        .iter()
        .filter(|r| kb.concept(r.action.concept.as_str()).is_some())
        .cloned()
        .collect();
    Ok(Extractor::new(kb, &lexicon, &rules)?)
}

/// An immutable snapshot of everything the store holds.
#[derive(Clone, Debug)]
pub struct State {
    pub config: Config,
    pub kb: KnowledgeBase,
    pub lexicon: Vec<LexicalEntry>,
    pub rules: Vec<PatternRule>,
    pub extractor: Extractor,
    pub articles: BTreeMap<String, StoredArticle>,
    pub annotations: BTreeMap<String, Vec<Annotation>>,
    pub index: CorpusIndex,
    pub profiles: BTreeMap<String, Profile>,
    pub alert_log: AlertLog,
    /// Alerts in the order they fired.
    pub alerts: Vec<Alert>,
}

impl State {
    fn new(opts: InitOptions) -> Result<Self> {
        opts.config.validate()?;
        let kb = KnowledgeBase::from_layers(&opts.layers)?;
        // the full lexicon must compile when a store is created
        Extractor::new(&kb, &opts.lexicon, &opts.rules)?;
        let extractor = build_extractor(&kb, &opts.lexicon, &opts.rules)?;
        Ok(State {
            config: opts.config,
            kb,
            lexicon: opts.lexicon,
            rules: opts.rules,
            extractor,
            articles: BTreeMap::new(),
            annotations: BTreeMap::new(),
            index: CorpusIndex::new(),
            profiles: BTreeMap::new(),
            alert_log: AlertLog::new(),
            alerts: Vec::new(),
        })
    }

    fn full_txn(&self) -> Txn {
        let mut txn = Txn::default();
        txn.put_json("config.json", &self.config);
        self.put_ontology(&mut txn);
        txn.put_json("lexicon.json", &self.lexicon);
        txn.put_json("rules.json", &self.rules);
        txn.put("index.json", compact(&self.index));
        txn.put("alerts.log", json_lines(&self.alerts));
        txn
    }

    fn put_ontology(&self, txn: &mut Txn) {
        for layer in LayerId::ALL {
            txn.put(layer_path(layer), self.kb.layer_doc(layer).to_json() + "\n");
        }
    }

    pub fn article(&self, id: &str) -> Result<&StoredArticle> {
        self.articles.get(id).ok_or_else(|| ServiceError::not_found("article", id))
    }

    pub fn article_annotations(&self, id: &str) -> Result<&[Annotation]> {
        self.article(id)?;
        Ok(self.annotations.get(id).map(Vec::as_slice).unwrap_or(&[]))
    }

    pub fn profile(&self, user: &str) -> Result<&Profile> {
        self.profiles.get(user).ok_or_else(|| ServiceError::not_found("user", user))
    }

    pub fn daily(&self, date: NaiveDate) -> impl Iterator<Item = &str> {
        self.articles
            .values()
            .filter(move |a| a.doc.published_date == date)
            .map(|a| a.doc.id.as_str())
    }

    pub fn review(&self, user: &str, date: NaiveDate) -> Result<Review> {
        let profile = self.profile(user)?;
        let review = generate_review(
            profile,
            date,
            self.daily(date),
            &self.index,
            self.config.k,
            self.config.theta,
        )?;
        Ok(review.with_titles(|id| self.articles.get(id).map(|a| a.doc.title.clone())))
    }

    pub fn user_alerts(&self, user: &str) -> Result<Vec<Alert>> {
        self.profile(user)?;
        Ok(self.alerts.iter().filter(|a| a.user_id == user).cloned().collect())
    }

    pub fn digest(&self, concept: &str) -> Result<Digest> {
        let view = self.annotations.iter().map(|(d, a)| (d.as_str(), a.as_slice()));
        Ok(knowledge_digest(&self.kb, view, concept)?)
    }

    pub fn layer(&self, name: &str) -> Result<LayerDoc> {
        let layer = LayerId::parse(name).ok_or_else(|| ServiceError::not_found("layer", name))?;
        Ok(self.kb.layer_doc(layer))
    }

    /// Annotations a document would receive, with entity linking, without
    /// touching the store.
    pub fn annotate(&self, doc: &Document) -> Result<Vec<Annotation>> {
        let mut kb = self.kb.clone();
        let mut lexicon = self.lexicon.clone();
        let mut anns = self.extractor.annotate(doc);
        populate(&mut kb, &mut lexicon, &self.extractor.rules, &doc.full_text(), &mut anns)?;
        Ok(anns)
    }

    /// Cross-file consistency problems, empty for a sound store.
    pub fn check(&self) -> Vec<String> {
        let mut problems: Vec<String> = self
            .kb
            .validate()
            .into_iter()
            .map(|v: Violation| format!("ontology: {v}"))
            .collect();
        for id in self.annotations.keys() {
            if !self.articles.contains_key(id) {
                problems.push(format!("annotations for unknown article {id}"));
            }
        }
        for (id, _) in self.index.vectors() {
            if !self.articles.contains_key(id) {
                problems.push(format!("index entry for unknown article {id}"));
            }
        }
        if self.index.len() != self.articles.len() {
            problems.push(format!(
                "index holds {} documents but the store has {} articles",
                self.index.len(),
                self.articles.len()
            ));
        }
        for id in self.articles.keys() {
            if !self.index.contains(id) {
                problems.push(format!("article {id} is not indexed"));
            }
        }
        for (user, p) in &self.profiles {
            for h in &p.history {
                if !self.index.contains(&h.event.article_id) {
                    problems.push(format!("profile {user} rated unknown article {}", h.event.article_id));
                }
            }
        }
        problems
    }

    fn ingest(&self, doc: Document) -> Result<(State, IngestReport, Txn)> {
        check_id("article", &doc.id)?;
        if self.articles.contains_key(&doc.id) {
            return Err(ServiceError::DuplicateArticle(doc.id));
        }
        let mut next = self.clone();
        let text = doc.full_text();
        let mut anns = next.extractor.annotate(&doc);
        let population = populate(&mut next.kb, &mut next.lexicon, &next.extractor.rules, &text, &mut anns)?;
        next.link_article(&doc, &anns)?;

        let counts = raw_counts(&anns, &next.kb, next.config.expansion())?;
        next.index.add_counts(&doc.id, &counts)?;

        let mut fired = Vec::new();
        for profile in next.profiles.values() {
            fired.extend(detect_alerts(
                &next.kb,
                &population.new_individuals,
                profile,
                next.config.tau,
                &doc.id,
                doc.published_date,
            )?);
        }
        let fired = next.alert_log.admit(fired);
        next.alerts.extend(fired.iter().cloned());

        if !population.new_entries.is_empty() {
            next.extractor = build_extractor(&next.kb, &next.lexicon, &next.rules)?;
        }
        let seq = self.articles.values().map(|a| a.seq + 1).max().unwrap_or(0);
        let stored = StoredArticle { doc, seq };
        let id = stored.doc.id.clone();

        let mut txn = Txn::default();
        txn.put_json(article_path(&id), &stored);
        txn.put(annotations_path(&id), json_lines(&anns));
        txn.put("index.json", compact(&next.index));
        next.put_ontology(&mut txn);
        if !population.new_entries.is_empty() {
            txn.put_json("lexicon.json", &next.lexicon);
        }
        if !fired.is_empty() {
            txn.put("alerts.log", json_lines(&next.alerts));
        }

        let report = IngestReport {
            annotations: anns.len(),
            new_individuals: population.new_individuals,
            index_n: next.index.len(),
        };
        next.articles.insert(id.clone(), stored);
        next.annotations.insert(id, anns);
        Ok((next, report, txn))
    }

    /// Record the article in the corpus layer: its individual, its date
    /// and the entities it mentions, as far as the ontology allows.
    fn link_article(&mut self, doc: &Document, anns: &[Annotation]) -> Result<()> {
        if self.kb.concept(vocab::ARTICLE).is_none() {
            return Ok(());
        }
        let subject = vocab::article_individual(&doc.id);
        self.kb
            .add_individual(Individual::new(subject.as_str(), doc.title.as_str(), vocab::ARTICLE, LayerId::Corpus))
            .map_err(|e| match e {
                KbError::DuplicateId(id) => ServiceError::SchemaError(format!("article individual {id} already exists")),
                other => other.into(),
            })?;
        let date = doc.published_date.format("%Y-%m-%d").to_string();
        let _ = self
            .kb
            .assert_relation(Assertion::literal(subject.as_str(), vocab::PUBLISHED_ON, date, Datatype::Date));
        let mentioned: BTreeSet<&IndividualId> = anns.iter().filter_map(|a| a.individual.as_ref()).collect();
        for ind in mentioned {
            let _ = self
                .kb
                .assert_relation(Assertion::link(subject.as_str(), vocab::MENTIONS, ind.clone()));
        }
        Ok(())
    }

    fn set_profile(&self, user: &str, seeds: Vec<ConceptId>, now: DateTime<Utc>) -> Result<(State, Profile, Txn)> {
        check_id("user", user)?;
        let profile = init_profile(user, seeds, &self.kb, now)?;
        let mut next = self.clone();
        next.profiles.insert(user.to_owned(), profile.clone());
        let mut txn = Txn::default();
        txn.put_json(profile_path(user), &profile);
        Ok((next, profile, txn))
    }

    fn apply_event(&self, event: FeedbackEvent, strength: f64, alpha: f64) -> Result<(State, Profile, Txn)> {
        let user = event.user_id.clone();
        let current = self.profile(&user)?;
        if event.timestamp < current.updated_at {
            return Err(ServiceError::OutOfOrder {
                event: event.timestamp.to_rfc3339(),
                last: current.updated_at.to_rfc3339(),
            });
        }
        let vector = self
            .index
            .vector(&event.article_id)
            .ok_or_else(|| ServiceError::not_found("article", &event.article_id))?;
        let profile = apply_feedback(current, event, vector, strength, alpha)?;
        let mut next = self.clone();
        next.profiles.insert(user.clone(), profile.clone());
        let mut txn = Txn::default();
        txn.put_json(profile_path(&user), &profile);
        Ok((next, profile, txn))
    }

    fn swap_domain(&self, doc: &LayerDoc) -> Result<(State, DanglingReport, Txn)> {
        let refs = external_refs(&self.lexicon, &self.annotations);
        let mut next = self.clone();
        let report = next.kb.swap_domain_ontology(doc, &refs)?;
        next.extractor = build_extractor(&next.kb, &next.lexicon, &next.rules)?;
        let mut txn = Txn::default();
        next.put_ontology(&mut txn);
        Ok((next, report, txn))
    }
}

/// A store opened for writing. Readers take [`Store::state`] snapshots.
pub struct Store {
    root: PathBuf,
    state: Arc<State>,
    fail: Option<FailPoint>,
}

impl Store {
    pub fn init(root: impl AsRef<Path>, opts: InitOptions) -> Result<Store> {
        let root = root.as_ref().to_path_buf();
        if root.join("config.json").exists() || root.join("index.json").exists() {
            return Err(ServiceError::AlreadyInitialized(root.display().to_string()));
        }
        fs::create_dir_all(&root).map_err(|e| ServiceError::io(&root, e))?;
        let state = State::new(opts)?;
        state.full_txn().commit(&root, None)?;
        for dir in ["articles", "annotations", "profiles"] {
            let path = root.join(dir);
            fs::create_dir_all(&path).map_err(|e| ServiceError::io(&path, e))?;
        }
        Ok(Store {
            root,
            state: Arc::new(state),
            fail: None,
        })
    }

    /// Open an existing store; configuration overrides come from the
    /// process environment.
    pub fn open(root: impl AsRef<Path>) -> Result<Store> {
        Self::open_with(root, std::env::vars())
    }

    pub fn open_with<I, K, V>(root: impl AsRef<Path>, env: I) -> Result<Store>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let root = root.as_ref().to_path_buf();
        if !root.join("config.json").exists() {
            return Err(ServiceError::NotAStore(root.display().to_string()));
        }
        recover(&root)?;
        let config = Config::from_json(&read(&root.join("config.json"))?)?.apply_overrides(env)?;
        let mut layers = Vec::new();
        for layer in LayerId::ALL {
            let path = root.join(layer_path(layer));
            layers.push(parse::<LayerDoc>(&path, &read(&path)?)?);
        }
        let kb = KnowledgeBase::from_layers(&layers)?;
        let lexicon: Vec<LexicalEntry> = parse(&root.join("lexicon.json"), &read(&root.join("lexicon.json"))?)?;
        let rules: Vec<PatternRule> = parse(&root.join("rules.json"), &read(&root.join("rules.json"))?)?;
        let extractor = build_extractor(&kb, &lexicon, &rules)?;
        let index: CorpusIndex = parse(&root.join("index.json"), &read(&root.join("index.json"))?)?;

        let mut articles = BTreeMap::new();
        for path in list(&root.join("articles"), "json")? {
            let a: StoredArticle = parse(&path, &read(&path)?)?;
            articles.insert(a.doc.id.clone(), a);
        }
        let mut annotations = BTreeMap::new();
        for path in list(&root.join("annotations"), "jsonl")? {
            let text = read(&path)?;
            let anns = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| parse::<Annotation>(&path, l))
                .collect::<Result<Vec<_>>>()?;
            let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            annotations.insert(id, anns);
        }
        let mut profiles = BTreeMap::new();
        for path in list(&root.join("profiles"), "json")? {
            let p: Profile = parse(&path, &read(&path)?)?;
            profiles.insert(p.user_id.clone(), p);
        }
        let alerts_path = root.join("alerts.log");
        let alert_text = if alerts_path.exists() { read(&alerts_path)? } else { String::new() };
        let alerts = alert_text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| parse::<Alert>(&alerts_path, l))
            .collect::<Result<Vec<_>>>()?;
        let mut alert_log = AlertLog::new();
        alert_log.admit(alerts.clone());

        let state = State {
            config,
            kb,
            lexicon,
            rules,
            extractor,
            articles,
            annotations,
            index,
            profiles,
            alert_log,
            alerts,
        };
        let problems = state.check();
        if !problems.is_empty() {
            return Err(ServiceError::SchemaError(problems.join("; ")));
        }
        Ok(Store {
            root,
            state: Arc::new(state),
            fail: None,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn state(&self) -> Arc<State> {
        Arc::clone(&self.state)
    }

    /// Make the next commit stop at the given point, as a crash would.
    pub fn set_failpoint(&mut self, fail: Option<FailPoint>) {
        self.fail = fail;
    }

    fn commit<T>(&mut self, (next, out, txn): (State, T, Txn)) -> Result<T> {
        txn.commit(&self.root, self.fail.take())?;
        self.state = Arc::new(next);
        Ok(out)
    }

    /// Annotate, populate, index and alert, as one transaction.
    pub fn ingest(&mut self, doc: Document) -> Result<IngestReport> {
        let step = self.state.ingest(doc)?;
        self.commit(step)
    }

    pub fn set_profile(&mut self, user: &str, req: ProfileRequest, now: DateTime<Utc>) -> Result<Profile> {
        let step = self.state.set_profile(user, req.seeds, req.created_at.unwrap_or(now))?;
        self.commit(step)
    }

    /// Apply one feedback event with the configured signal table and
    /// learning rate. Without a timestamp the event is stamped `now`.
    pub fn feedback(&mut self, user: &str, req: FeedbackRequest, now: DateTime<Utc>) -> Result<Profile> {
        let kind = FeedbackKind::parse(&req.kind, req.rating)?;
        let last = self.state.profile(user)?.updated_at;
        let event = FeedbackEvent {
            user_id: user.to_owned(),
            article_id: req.article_id,
            kind,
            timestamp: req.timestamp.unwrap_or(now.max(last)),
        };
        let strength = signal_strength(kind, &self.state.config.signals);
        let alpha = self.state.config.alpha;
        let step = self.state.apply_event(event, strength, alpha)?;
        self.commit(step)
    }

    /// Re-apply a recorded history entry with its original parameters.
    pub fn replay_entry(&mut self, entry: &HistoryEntry) -> Result<Profile> {
        let step = self.state.apply_event(entry.event.clone(), entry.strength, entry.alpha)?;
        self.commit(step)
    }

    pub fn swap_domain(&mut self, doc: &LayerDoc) -> Result<DanglingReport> {
        let step = self.state.swap_domain(doc)?;
        self.commit(step)
    }

    /// Rebuild a store at `dst` from this store's articles and feedback
    /// histories, starting from `base`.
    pub fn rebuild(&self, dst: impl AsRef<Path>, mut base: InitOptions) -> Result<Store> {
        base.config = self.state.config.clone();
        let mut out = Store::init(dst, base)?;
        let mut articles: Vec<&StoredArticle> = self.state.articles.values().collect();
        articles.sort_by_key(|a| a.seq);
        for a in articles {
            out.ingest(a.doc.clone())?;
        }
        for (user, p) in &self.state.profiles {
            let req = ProfileRequest {
                seeds: p.seeds.iter().cloned().collect(),
                created_at: Some(p.created_at),
            };
            out.set_profile(user, req, p.created_at)?;
            for entry in &p.history {
                out.replay_entry(entry)?;
            }
        }
        Ok(out)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| ServiceError::io(path, e))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| ServiceError::SchemaError(format!("{}: {e}", path.display())))
}

fn list(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| ServiceError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .collect();
    out.sort();
    Ok(out)
}
