use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{NaiveDate, Utc};
use clap::{Parser, Subcommand};
use ontorec::extract::Document;
use ontorec::kbase::{KnowledgeBase, LayerDoc, LayerId};
use ontorec_service::store::{FeedbackRequest, ProfileRequest};
use ontorec_service::{api, eval_baseline, EvalSpec, InitOptions, ServiceError, Store};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ontorec", version, about = "Concept-vector news recommender")]
struct Cli {
    /// Store directory.
    #[arg(long, short, env = "ONTOREC_STORE", default_value = "store", global = true)]
    store: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a store with the bundled ontology, lexicon and rules.
    Init,
    /// Ingest an article, or a JSON array of articles.
    Ingest { file: PathBuf },
    /// Print the annotations an article would receive, without storing it.
    Annotate { file: PathBuf },
    /// Create or reset a user profile from seed concepts.
    Profile {
        user: String,
        #[arg(required = true)]
        seeds: Vec<String>,
    },
    /// Print a user's review for a date.
    Recommend { user: String, date: NaiveDate },
    /// Record feedback: +1, -1, opened, readLong or skipped.
    Feedback {
        user: String,
        article: String,
        #[arg(allow_hyphen_values = true)]
        signal: String,
    },
    /// Serve the HTTP API.
    Serve {
        /// Address to bind, overriding the configuration.
        #[arg(long)]
        bind: Option<String>,
    },
    /// Compare the concept recommender with the keyword baseline.
    Eval { spec: PathBuf },
    /// Rebuild the store elsewhere from its articles and feedback history.
    Rebuild { dst: PathBuf },
    /// Validate the ontology or swap the domain layer.
    #[command(subcommand)]
    Ontology(OntologyCommand),
}

#[derive(Subcommand)]
enum OntologyCommand {
    /// Check the store's ontology, or a layer file against it.
    Validate { file: Option<PathBuf> },
    /// Replace the domain layer and print the dangling-reference report.
    Swap { file: PathBuf },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ServiceError> {
    let text = fs::read_to_string(path).map_err(|e| ServiceError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| ServiceError::SchemaError(format!("{}: {e}", path.display())))
}

fn read_documents(path: &Path) -> Result<Vec<Document>, ServiceError> {
    let value: serde_json::Value = read_json(path)?;
    let docs = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value),
        other => serde_json::from_value(other).map(|d| vec![d]),
    };
    docs.map_err(|e| ServiceError::SchemaError(format!("{}: {e}", path.display())))
}

/// Write errors (a closed pipe) are ignored.
fn print<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    let _ = writeln!(io::stdout().lock(), "{text}");
}

fn feedback_request(article: String, signal: &str) -> FeedbackRequest {
    let (kind, rating) = match signal {
        "+1" | "1" => ("explicit", Some(1)),
        "-1" => ("explicit", Some(-1)),
        other => (other, None),
    };
    FeedbackRequest {
        article_id: article,
        kind: kind.to_owned(),
        rating,
        timestamp: None,
    }
}

fn validate_layer(store: &Store, file: &Path) -> Result<Vec<String>, ServiceError> {
    let doc: LayerDoc = read_json(file)?;
    let state = store.state();
    let mut layers: Vec<LayerDoc> = LayerId::ALL
        .into_iter()
        .filter(|l| *l != doc.layer)
        .map(|l| state.kb.layer_doc(l))
        .collect();
    layers.push(doc);
    Ok(match KnowledgeBase::from_layers(&layers) {
        Ok(_) => Vec::new(),
        Err(e) => vec![e.to_string()],
    })
}

fn run(cli: Cli) -> Result<(), ServiceError> {
    let root = cli.store;
    match cli.command {
        Command::Init => {
            Store::init(&root, InitOptions::default())?;
            println!("initialized {}", root.display());
        }
        Command::Ingest { file } => {
            let mut store = Store::open(&root)?;
            for doc in read_documents(&file)? {
                print(&store.ingest(doc)?);
            }
        }
        Command::Annotate { file } => {
            let store = Store::open(&root)?;
            let state = store.state();
            for doc in read_documents(&file)? {
                print(&state.annotate(&doc)?);
            }
        }
        Command::Profile { user, seeds } => {
            let mut store = Store::open(&root)?;
            let req = ProfileRequest {
                seeds: seeds.into_iter().map(Into::into).collect(),
                created_at: None,
            };
            print(&store.set_profile(&user, req, Utc::now())?);
        }
        Command::Recommend { user, date } => {
            let store = Store::open(&root)?;
            print(&store.state().review(&user, date)?);
        }
        Command::Feedback { user, article, signal } => {
            let mut store = Store::open(&root)?;
            print(&store.feedback(&user, feedback_request(article, &signal), Utc::now())?);
        }
        Command::Serve { bind } => {
            let store = Store::open(&root)?;
            let bind = bind.unwrap_or_else(|| store.state().config.bind.clone());
            let runtime = tokio::runtime::Runtime::new().map_err(|e| ServiceError::io(&root, e))?;
            eprintln!("listening on {bind}");
            runtime.block_on(api::serve(store, &bind))?;
        }
        Command::Eval { spec } => {
            let store = Store::open(&root)?;
            let spec: EvalSpec = read_json(&spec)?;
            print(&eval_baseline(&store.state(), &spec)?);
        }
        Command::Rebuild { dst } => {
            let store = Store::open(&root)?;
            store.rebuild(&dst, InitOptions::default())?;
            println!("rebuilt into {}", dst.display());
        }
        Command::Ontology(OntologyCommand::Validate { file }) => {
            let store = Store::open(&root)?;
            let problems = match file {
                Some(f) => validate_layer(&store, &f)?,
                None => store.state().check(),
            };
            if problems.is_empty() {
                println!("ok");
            } else {
                for p in &problems {
                    println!("{p}");
                }
                return Err(ServiceError::SchemaError(format!("{} problem(s)", problems.len())));
            }
        }
        Command::Ontology(OntologyCommand::Swap { file }) => {
            let mut store = Store::open(&root)?;
            let doc: LayerDoc = read_json(&file)?;
            print(&store.swap_domain(&doc)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}
