//! JSON over HTTP. Reads are served from the latest committed snapshot;
//! writes are serialized through a single writer.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State as AxumState};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use chrono::{NaiveDate, Utc};
use ontorec::extract::Document;
use ontorec::kbase::LayerDoc;
use serde::de::DeserializeOwned;
use serde::Serialize;
use tokio::sync::Mutex;

use crate::error::ServiceError;
use crate::store::{FeedbackRequest, ProfileRequest, State, Store};

pub struct Service {
    writer: Mutex<Store>,
    snapshot: RwLock<Arc<State>>,
}

impl Service {
    pub fn new(store: Store) -> Arc<Self> {
        Arc::new(Service {
            snapshot: RwLock::new(store.state()),
            writer: Mutex::new(store),
        })
    }

    pub fn snapshot(&self) -> Arc<State> {
        Arc::clone(&self.snapshot.read().expect("snapshot lock"))
    }

    async fn write<T>(&self, op: impl FnOnce(&mut Store) -> Result<T, ServiceError>) -> Result<T, ServiceError> {
        let mut store = self.writer.lock().await;
        let out = op(&mut store)?;
        *self.snapshot.write().expect("snapshot lock") = store.state();
        Ok(out)
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        json(status, &self.body())
    }
}

fn json<T: Serialize>(status: StatusCode, value: &T) -> Response {
    let body = serde_json::to_vec(value).expect("responses serialize");
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn ok<T: Serialize>(value: &T) -> Response {
    json(StatusCode::OK, value)
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ServiceError> {
    serde_json::from_slice(bytes).map_err(|e| ServiceError::SchemaError(e.to_string()))
}

type Shared = Arc<Service>;
type Reply = Result<Response, ServiceError>;

pub fn router(service: Shared) -> Router {
    Router::new()
        .route("/articles", post(post_article))
        .route("/articles/{id}", get(get_article))
        .route("/articles/{id}/annotations", get(get_annotations))
        .route("/users/{id}/profile", get(get_profile).put(put_profile))
        .route("/users/{id}/feedback", post(post_feedback))
        .route("/users/{id}/review", get(get_review))
        .route("/users/{id}/alerts", get(get_alerts))
        .route("/concepts/{id}/digest", get(get_digest))
        .route("/ontology/{layer}", get(get_layer).post(post_layer))
        .fallback(|| async { ServiceError::not_found("route", "").into_response() })
        .with_state(service)
}

async fn post_article(AxumState(s): AxumState<Shared>, bytes: Bytes) -> Reply {
    let doc: Document = body(&bytes)?;
    let report = s.write(|store| store.ingest(doc)).await?;
    Ok(json(StatusCode::CREATED, &report))
}

async fn get_article(AxumState(s): AxumState<Shared>, Path(id): Path<String>) -> Reply {
    Ok(ok(&s.snapshot().article(&id)?.doc))
}

async fn get_annotations(AxumState(s): AxumState<Shared>, Path(id): Path<String>) -> Reply {
    Ok(ok(&s.snapshot().article_annotations(&id)?))
}

async fn get_profile(AxumState(s): AxumState<Shared>, Path(id): Path<String>) -> Reply {
    Ok(ok(s.snapshot().profile(&id)?))
}

async fn put_profile(AxumState(s): AxumState<Shared>, Path(id): Path<String>, bytes: Bytes) -> Reply {
    let req: ProfileRequest = body(&bytes)?;
    let profile = s.write(|store| store.set_profile(&id, req, Utc::now())).await?;
    Ok(ok(&profile))
}

async fn post_feedback(AxumState(s): AxumState<Shared>, Path(id): Path<String>, bytes: Bytes) -> Reply {
    let req: FeedbackRequest = body(&bytes)?;
    let profile = s.write(|store| store.feedback(&id, req, Utc::now())).await?;
    Ok(ok(&profile))
}

async fn get_review(
    AxumState(s): AxumState<Shared>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Reply {
    let raw = q
        .get("date")
        .ok_or_else(|| ServiceError::SchemaError("missing `date` query parameter".into()))?;
    let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .map_err(|_| ServiceError::SchemaError(format!("`{raw}` is not a YYYY-MM-DD date")))?;
    Ok(ok(&s.snapshot().review(&id, date)?))
}

async fn get_alerts(AxumState(s): AxumState<Shared>, Path(id): Path<String>) -> Reply {
    Ok(ok(&s.snapshot().user_alerts(&id)?))
}

async fn get_digest(AxumState(s): AxumState<Shared>, Path(id): Path<String>) -> Reply {
    Ok(ok(&s.snapshot().digest(&id)?))
}

async fn get_layer(AxumState(s): AxumState<Shared>, Path(layer): Path<String>) -> Reply {
    Ok(ok(&s.snapshot().layer(&layer)?))
}

/// Only the domain layer can be replaced.
async fn post_layer(AxumState(s): AxumState<Shared>, Path(layer): Path<String>, bytes: Bytes) -> Reply {
    if layer != "domain" {
        return Err(ServiceError::not_found("route", format!("POST /ontology/{layer}")));
    }
    let doc: LayerDoc = body(&bytes)?;
    let report = s.write(|store| store.swap_domain(&doc)).await?;
    Ok(ok(&report))
}

/// Bind and serve until interrupted.
pub async fn serve(store: Store, bind: &str) -> Result<(), ServiceError> {
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .map_err(|e| ServiceError::BindFailure {
            addr: bind.to_owned(),
            message: e.to_string(),
        })?;
    let app = router(Service::new(store));
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::BindFailure {
            addr: bind.to_owned(),
            message: e.to_string(),
        })
}
