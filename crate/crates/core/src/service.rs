//! HTTP session service.
//!
//! | route                         | effect                                   |
//! |-------------------------------|------------------------------------------|
//! | `POST /kb`                    | register `.dune` text, returns `kb_id`    |
//! | `POST /sessions`              | `{kb_id}` -> new session                 |
//! | `POST /sessions/{id}/features`| `{feature}` -> step report               |
//! | `GET /sessions/{id}`          | current view                             |
//! | `GET /sessions/{id}/trace`    | full step log                            |
//! | `GET /sessions/{id}/question` | next suggested question, or `null`       |
//! | `GET /healthz`                | `ok`                                     |
//!
//! Sessions live in memory. Mutations within one session are serialized by
//! a per-session lock; distinct sessions proceed independently.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{Event, QuestionSuggestion, Reachability, StepReport, TraceRow};
use crate::feature::FeatureId;
use crate::kb::{parse_kb, validate_kb, Diagnostic, KnowledgeBase};
use crate::session::Session;

/// Content address of a knowledge base's source text.
pub fn kb_id(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
}

struct SessionEntry {
    kb_id: String,
    session: Mutex<Session>,
}

#[derive(Default)]
pub struct AppState {
    kbs: RwLock<HashMap<String, Arc<KnowledgeBase>>>,
    sessions: RwLock<HashMap<String, Arc<SessionEntry>>>,
    log_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEvent {
    pub fnum: usize,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemonReachability {
    pub demon: String,
    pub reachability: Reachability,
}

/// Everything a client needs to draw the current state of a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiSessionView {
    pub session_id: String,
    pub kb_id: String,
    pub created_at: String,
    pub step: usize,
    pub rows: Vec<TraceRow>,
    pub events: Vec<StepEvent>,
    pub suggestion: Option<QuestionSuggestion>,
    pub reachability: Vec<DemonReachability>,
    pub vocabulary: Vec<FeatureId>,
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("knowledge base has errors")]
    InvalidKb(Vec<Diagnostic>),
    #[error("unknown kb_id `{0}`")]
    UnknownKb(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("opening session log: {0}")]
    Io(#[from] std::io::Error),
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        match self {
            ServiceError::InvalidKb(diagnostics) => {
                (StatusCode::UNPROCESSABLE_ENTITY, Json(serde_json::json!({ "diagnostics": diagnostics }))).into_response()
            }
            other => {
                let status = match other {
                    ServiceError::UnknownKb(_) | ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
                    ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
                    _ => StatusCode::INTERNAL_SERVER_ERROR,
                };
                (status, Json(serde_json::json!({ "error": other.to_string() }))).into_response()
            }
        }
    }
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sessions created from now on persist their log to
    /// `<dir>/<session_id>.jsonl`.
    pub fn with_log_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.log_dir = Some(dir.into());
        self
    }

    /// Parses and validates `text`; identical text always yields the same id.
    pub fn register_kb(&self, text: &str) -> Result<String, ServiceError> {
        let kb = parse_kb(text).map_err(ServiceError::InvalidKb)?;
        let diags = validate_kb(&kb);
        if diags.iter().any(Diagnostic::is_error) {
            return Err(ServiceError::InvalidKb(diags));
        }
        let id = kb_id(text);
        self.kbs.write().entry(id.clone()).or_insert_with(|| Arc::new(kb));
        Ok(id)
    }

    pub fn kb_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.kbs.read().keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn create_session(&self, kb_id: &str) -> Result<String, ServiceError> {
        let kb = self.kbs.read().get(kb_id).cloned().ok_or_else(|| ServiceError::UnknownKb(kb_id.to_string()))?;
        let mut session = Session::new(kb).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        if let Some(dir) = &self.log_dir {
            let file = File::create(dir.join(format!("{}.jsonl", session.id())))?;
            session.persist_to(BufWriter::new(file));
        }
        let id = session.id().to_string();
        let entry = SessionEntry { kb_id: kb_id.to_string(), session: Mutex::new(session) };
        self.sessions.write().insert(id.clone(), Arc::new(entry));
        Ok(id)
    }

    fn entry(&self, session_id: &str) -> Result<Arc<SessionEntry>, ServiceError> {
        self.sessions
            .read()
            .get(session_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(session_id.to_string()))
    }

    pub fn submit(&self, session_id: &str, feature: &str) -> Result<StepReport, ServiceError> {
        let feature = FeatureId::new(feature).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        let entry = self.entry(session_id)?;
        let mut session = entry.session.lock();
        let (report, persisted) = session.submit(&feature);
        if let Err(err) = persisted {
            eprintln!("session {session_id}: failed to persist step {}: {err}", report.fnum);
        }
        Ok(report)
    }

    pub fn view(&self, session_id: &str) -> Result<ApiSessionView, ServiceError> {
        let entry = self.entry(session_id)?;
        let session = entry.session.lock();
        let engine = session.engine();
        let events = session
            .log()
            .iter()
            .flat_map(|r| r.events.iter().map(|e| StepEvent { fnum: r.fnum, event: e.clone() }))
            .collect();
        Ok(ApiSessionView {
            session_id: session.id().to_string(),
            kb_id: entry.kb_id.clone(),
            created_at: session.created_at_iso(),
            step: engine.step(),
            rows: engine.snapshot(),
            events,
            suggestion: engine.best_question(),
            reachability: engine
                .reachabilities()
                .into_iter()
                .map(|(demon, reachability)| DemonReachability { demon, reachability })
                .collect(),
            vocabulary: engine.kb().vocabulary().into_iter().collect(),
        })
    }

    pub fn trace(&self, session_id: &str) -> Result<Vec<StepReport>, ServiceError> {
        Ok(self.entry(session_id)?.session.lock().log().to_vec())
    }

    pub fn question(&self, session_id: &str) -> Result<Option<QuestionSuggestion>, ServiceError> {
        Ok(self.entry(session_id)?.session.lock().engine().best_question())
    }
}

#[derive(Deserialize)]
struct CreateSession {
    kb_id: String,
}

#[derive(Deserialize)]
struct SubmitFeature {
    feature: String,
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(format!("invalid request body: {e}")))
}

async fn post_kb(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<serde_json::Value>, ServiceError> {
    let text = std::str::from_utf8(&body).map_err(|_| ServiceError::BadRequest("body is not UTF-8".into()))?;
    let id = state.register_kb(text)?;
    Ok(Json(serde_json::json!({ "kb_id": id })))
}

async fn post_session(State(state): State<Arc<AppState>>, body: Bytes) -> Result<impl IntoResponse, ServiceError> {
    let req: CreateSession = parse_body(&body)?;
    let id = state.create_session(&req.kb_id)?;
    Ok((StatusCode::CREATED, Json(serde_json::json!({ "session_id": id }))))
}

async fn post_feature(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<StepReport>, ServiceError> {
    let req: SubmitFeature = parse_body(&body)?;
    // unknown session wins over a malformed feature
    state.entry(&id)?;
    Ok(Json(state.submit(&id, &req.feature)?))
}

async fn get_view(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<ApiSessionView>, ServiceError> {
    Ok(Json(state.view(&id)?))
}

async fn get_trace(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Vec<StepReport>>, ServiceError> {
    Ok(Json(state.trace(&id)?))
}

async fn get_question(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<Option<QuestionSuggestion>>, ServiceError> {
    Ok(Json(state.question(&id)?))
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/kb", post(post_kb))
        .route("/sessions", post(post_session))
        .route("/sessions/{id}", get(get_view))
        .route("/sessions/{id}/features", post(post_feature))
        .route("/sessions/{id}/trace", get(get_trace))
        .route("/sessions/{id}/question", get(get_question))
        .route("/healthz", get(healthz))
        .with_state(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn kb_ids_are_content_addressed() {
        let state = AppState::new();
        let a = state.register_kb(fixtures::KB_RUN1).unwrap();
        let b = state.register_kb(fixtures::KB_RUN1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 32);
        assert_ne!(a, state.register_kb(fixtures::KB_RUN2).unwrap());
        assert_eq!(state.kb_ids().len(), 2);
    }

    #[test]
    fn sessions_are_independent() {
        let state = AppState::new();
        let kb = state.register_kb(fixtures::KB_RUN1).unwrap();
        let s1 = state.create_session(&kb).unwrap();
        let s2 = state.create_session(&kb).unwrap();
        assert_ne!(s1, s2);
        state.submit(&s1, "fatigue").unwrap();
        assert_eq!(state.view(&s1).unwrap().step, 1);
        assert_eq!(state.view(&s2).unwrap().step, 0);
        assert!(matches!(state.create_session("nope"), Err(ServiceError::UnknownKb(_))));
        assert!(matches!(state.submit(&s1, "Fatigue!"), Err(ServiceError::BadRequest(_))));
    }
}
