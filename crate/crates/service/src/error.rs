use std::io;

use ontorec::extract::ExtractError;
use ontorec::index::IndexError;
use ontorec::kbase::KbError;
use ontorec::profile::ProfileError;
use ontorec::recommend::RecommendError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("article `{0}` has already been ingested")]
    DuplicateArticle(String),
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("unknown {kind} `{id}`")]
    NotFound { kind: &'static str, id: String },
    #[error("the corpus is empty")]
    EmptyCorpus,
    #[error("the evaluation spec has no cases")]
    EmptyEvalSpec,
    #[error("feedback at {event} predates the profile's last update at {last}")]
    OutOfOrder { event: String, last: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("`{0}` is not an initialized store")]
    NotAStore(String),
    #[error("`{0}` already contains a store")]
    AlreadyInitialized(String),
    #[error("could not bind {addr}: {message}")]
    BindFailure { addr: String, message: String },
    #[error("injected failure at {0}")]
    InjectedFailure(&'static str),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Recommend(#[from] RecommendError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
}

impl ServiceError {
    pub fn not_found(kind: &'static str, id: impl Into<String>) -> Self {
        ServiceError::NotFound { kind, id: id.into() }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        ServiceError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::DuplicateArticle(_) => "DuplicateArticle",
            ServiceError::SchemaError(_) => "SchemaError",
            ServiceError::NotFound { .. } => "NotFound",
            ServiceError::EmptyCorpus => "EmptyCorpus",
            ServiceError::EmptyEvalSpec => "EmptyEvalSpec",
            ServiceError::OutOfOrder { .. } => "OutOfOrder",
            ServiceError::Config(_) => "ConfigError",
            ServiceError::NotAStore(_) => "NotAStore",
            ServiceError::AlreadyInitialized(_) => "AlreadyInitialized",
            ServiceError::BindFailure { .. } => "BindFailure",
            ServiceError::InjectedFailure(_) => "InjectedFailure",
            ServiceError::Kb(KbError::InvalidDomainLayer(_)) => "InvalidDomainLayer",
            ServiceError::Kb(KbError::UnknownId(_)) => "NotFound",
            ServiceError::Kb(_) => "KnowledgeBaseError",
            ServiceError::Extract(_) => "ExtractionError",
            ServiceError::Index(IndexError::EmptyCorpus) => "EmptyCorpus",
            ServiceError::Index(_) => "IndexError",
            ServiceError::Profile(ProfileError::EmptySeeds) => "EmptySeeds",
            ServiceError::Profile(ProfileError::UnknownConcept(_)) => "UnknownConcept",
            ServiceError::Profile(ProfileError::UnknownSignalKind(_)) => "UnknownSignalKind",
            ServiceError::Profile(ProfileError::InvalidRating(_)) => "InvalidRating",
            ServiceError::Profile(ProfileError::EmptyArticleVector) => "EmptyArticleVector",
            ServiceError::Profile(_) => "ProfileError",
            ServiceError::Recommend(RecommendError::UnknownDoc(_)) => "NotFound",
            ServiceError::Recommend(RecommendError::Kb(KbError::UnknownId(_))) => "NotFound",
            ServiceError::Recommend(_) => "RecommendError",
            ServiceError::Io { .. } => "IoError",
        }
    }

    pub fn status(&self) -> u16 {
        match self.code() {
            "NotFound" => 404,
            "DuplicateArticle" | "OutOfOrder" | "AlreadyInitialized" => 409,
            "SchemaError" | "EmptySeeds" | "UnknownConcept" | "UnknownSignalKind" | "InvalidRating"
            | "ConfigError" | "ProfileError" | "RecommendError" => 400,
            "EmptyCorpus" | "EmptyEvalSpec" | "EmptyArticleVector" | "InvalidDomainLayer"
            | "KnowledgeBaseError" | "ExtractionError" | "IndexError" => 422,
            _ => 500,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            code: self.code().to_owned(),
            message: self.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
