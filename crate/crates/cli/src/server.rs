//! HTTP service for interactive resolution. Each session owns a corpus
//! tagged with the interactive policy; requests against one session are
//! serialized by its own lock, sessions never share state.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use morphtag_core::pipeline::{
    tag_corpus, write_answers, write_tsv, ChoiceError, ChoiceOutcome, InteractiveSession,
    PendingItem,
};
use morphtag_core::{Execution, Lexicon, ResolutionPolicy, RuleSet, StatsReport};

pub struct AppState {
    rules: RuleSet,
    lexicon: Lexicon,
    exec: Execution,
    next_id: AtomicU64,
    sessions: RwLock<HashMap<u64, Arc<Mutex<InteractiveSession>>>>,
}

impl AppState {
    pub fn new(rules: RuleSet, lexicon: Lexicon, exec: Execution) -> Self {
        AppState {
            rules,
            lexicon,
            exec,
            next_id: AtomicU64::new(1),
            sessions: RwLock::new(HashMap::new()),
        }
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<InteractiveSession>>, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(&id)
            .cloned()
            .ok_or(ApiError::new(StatusCode::NOT_FOUND, format!("no session {id}")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    remaining: Option<usize>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
            remaining: None,
        }
    }
}

impl From<ChoiceError> for ApiError {
    fn from(e: ChoiceError) -> Self {
        let status = match e {
            ChoiceError::NotPending { .. }
            | ChoiceError::InvalidParse { .. }
            | ChoiceError::MalformedAnswer(_) => StatusCode::BAD_REQUEST,
            ChoiceError::Conflict { .. } | ChoiceError::StillPending(_) => StatusCode::CONFLICT,
        };
        let remaining = match e {
            ChoiceError::StillPending(n) => Some(n),
            _ => None,
        };
        ApiError {
            status,
            message: e.to_string(),
            remaining,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(n) = self.remaining {
            body["remaining"] = n.into();
        }
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionCreated {
    pub id: u64,
    pub pending: usize,
}

#[derive(Debug, Serialize)]
pub struct PendingList {
    pub id: u64,
    pub remaining: usize,
    pub items: Vec<PendingItem>,
}

#[derive(Debug, Deserialize)]
pub struct Choice {
    pub sentence: usize,
    pub token: usize,
    pub parse: usize,
}

#[derive(Debug, Serialize)]
pub struct Output {
    pub tsv: String,
    pub stats: StatsReport,
}

type Shared = State<Arc<AppState>>;

async fn create(State(app): Shared, Json(req): Json<CreateSession>) -> Result<Response, ApiError> {
    let worker = app.clone();
    let corpus = tokio::task::spawn_blocking(move || {
        tag_corpus(
            &req.text,
            &worker.rules,
            &worker.lexicon,
            &ResolutionPolicy::Interactive,
            worker.exec,
        )
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
    .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?
    .0;
    let session = InteractiveSession::new(corpus);
    let pending = session.remaining();
    let id = app.next_id.fetch_add(1, Ordering::Relaxed);
    app.sessions
        .write()
        .unwrap()
        .insert(id, Arc::new(Mutex::new(session)));
    log::info!("session {id}: {pending} pending");
    Ok((StatusCode::CREATED, Json(SessionCreated { id, pending })).into_response())
}

async fn pending(State(app): Shared, Path(id): Path<u64>) -> Result<Json<PendingList>, ApiError> {
    let session = app.session(id)?;
    let s = session.lock().unwrap();
    Ok(Json(PendingList {
        id,
        remaining: s.remaining(),
        items: s.pending(),
    }))
}

async fn choose(
    State(app): Shared,
    Path(id): Path<u64>,
    Json(c): Json<Choice>,
) -> Result<Json<ChoiceOutcome>, ApiError> {
    let session = app.session(id)?;
    let outcome = session.lock().unwrap().choose(c.sentence, c.token, c.parse)?;
    Ok(Json(outcome))
}

async fn output(State(app): Shared, Path(id): Path<u64>) -> Result<Json<Output>, ApiError> {
    let session = app.session(id)?;
    let (corpus, stats) = session.lock().unwrap().finish(app.exec)?;
    Ok(Json(Output {
        tsv: write_tsv(&corpus.sentences),
        stats,
    }))
}

/// Choices so far as an `--answers` script.
async fn answers(State(app): Shared, Path(id): Path<u64>) -> Result<String, ApiError> {
    let session = app.session(id)?;
    let script = write_answers(&session.lock().unwrap().answers());
    Ok(script)
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create))
        .route("/sessions/{id}/pending", get(pending))
        .route("/sessions/{id}/choices", post(choose))
        .route("/sessions/{id}/output", get(output))
        .route("/sessions/{id}/answers", get(answers))
        .with_state(state)
}

pub async fn serve(state: AppState, host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(state))).await
}
