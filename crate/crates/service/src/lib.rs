//! Persistence, HTTP API and evaluation around the `ontorec` core.

pub mod api;
pub mod config;
pub mod error;
pub mod eval;
pub mod store;

pub use config::Config;
pub use error::{ErrorBody, Result, ServiceError};
pub use eval::{eval_baseline, EvalSpec, MetricsReport};
pub use store::{FailPoint, FeedbackRequest, IngestReport, InitOptions, ProfileRequest, State, Store};
