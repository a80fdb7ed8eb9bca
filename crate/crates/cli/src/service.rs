//! The walker service: a JSON API over walk sessions.
//!
//! | Method | Path | Result |
//! |---|---|---|
//! | POST | `/sessions` | create from `specPath`, `specSource` or base64 `controller` |
//! | GET | `/sessions/{id}/state` | cursor, history length, current values |
//! | GET | `/sessions/{id}/history` | every state of the history |
//! | GET | `/sessions/{id}/env-options?cap=N` | allowed next inputs |
//! | POST | `/sessions/{id}/step` | `{inputs}` to `{outputs}`; the first step picks the initial state |
//! | POST | `/sessions/{id}/back` | move the cursor back |
//! | POST | `/sessions/{id}/forward` | move the cursor forward |
//! | GET | `/sessions/{id}/trace.csv` | the trace up to the cursor |
//! | DELETE | `/sessions/{id}` | drop the session |

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use base64::Engine;
use serde::Deserialize;
use serde_json::{json, Map, Value as JsonValue};

use spectra_core::lowering::{Value, VarEncoding};
use spectra_core::runtime::{load, Controller, Inputs, WalkError, WalkSession, DEFAULT_OPTION_CAP};
use spectra_core::semcheck::Ty;
use spectra_core::syntax::VarKind;

use crate::pipeline::{controller_from_path, controller_from_source};

/// Default time after which an unused session is dropped.
pub const DEFAULT_IDLE: Duration = Duration::from_secs(3600);

struct Entry {
    walk: WalkSession,
    origin: String,
    last_used: Instant,
}

/// Live walk sessions by opaque id. Each session has its own lock, so
/// requests to one session run one at a time while distinct sessions
/// proceed independently.
pub struct SessionRegistry {
    sessions: Mutex<HashMap<String, Arc<tokio::sync::Mutex<Entry>>>>,
    idle: Duration,
}

impl SessionRegistry {
    pub fn new(idle: Duration) -> Self {
        SessionRegistry { sessions: Mutex::new(HashMap::new()), idle }
    }

    /// Registers a session and returns its id.
    pub fn insert(&self, walk: WalkSession, origin: String) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let entry = Entry { walk, origin, last_used: Instant::now() };
        let mut map = self.sessions.lock().expect("registry lock");
        map.insert(id.clone(), Arc::new(tokio::sync::Mutex::new(entry)));
        id
    }

    fn get(&self, id: &str) -> Option<Arc<tokio::sync::Mutex<Entry>>> {
        self.expire();
        self.sessions.lock().expect("registry lock").get(id).cloned()
    }

    fn remove(&self, id: &str) -> bool {
        self.sessions.lock().expect("registry lock").remove(id).is_some()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle for longer than the configured time. Sessions
    /// busy with a request are kept.
    pub fn expire(&self) {
        let idle = self.idle;
        self.sessions.lock().expect("registry lock").retain(|_, entry| match entry.try_lock() {
            Ok(e) => e.last_used.elapsed() <= idle,
            Err(_) => true,
        });
    }
}

/// Shared state of the service.
pub struct AppState {
    pub registry: SessionRegistry,
}

/// Builds the service router with a fresh registry.
pub fn app(idle: Duration) -> (Router, Arc<AppState>) {
    let state = Arc::new(AppState { registry: SessionRegistry::new(idle) });
    (router(state.clone()), state)
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", delete(remove))
        .route("/sessions/{id}/state", get(state_of))
        .route("/sessions/{id}/history", get(history))
        .route("/sessions/{id}/env-options", get(env_options))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/back", post(back))
        .route("/sessions/{id}/forward", post(forward))
        .route("/sessions/{id}/trace.csv", get(trace))
        .with_state(state)
}

/// Error responses. Every body is a JSON object with an `error` message.
#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    BadRequest(String),
    Conflict(JsonValue),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, json!({ "error": m })),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, json!({ "error": m })),
            ApiError::Conflict(body) => (StatusCode::CONFLICT, body),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": m })),
        };
        (status, Json(body)).into_response()
    }
}

impl From<WalkError> for ApiError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Violation(v) => ApiError::Conflict(json!({
                "error": v.to_string(),
                "violatedAssumptions": v.violated.iter()
                    .map(|a| json!({ "name": a.label, "location": a.location }))
                    .collect::<Vec<_>>(),
            })),
            WalkError::Stuck => ApiError::Internal(e.to_string()),
            other => ApiError::BadRequest(other.to_string()),
        }
    }
}

type ApiResult = Result<Response, ApiError>;

pub fn value_to_json(v: &Value) -> JsonValue {
    match v {
        Value::Bool(b) => JsonValue::Bool(*b),
        Value::Int(n) => json!(n),
        Value::Enum(s) => JsonValue::String(s.clone()),
    }
}

/// Interprets a JSON value as a value of `enc`. Strings are accepted for
/// every type.
pub fn value_from_json(enc: &VarEncoding, j: &JsonValue) -> Option<Value> {
    match (&enc.ty, j) {
        (Ty::Bool, JsonValue::Bool(b)) => Some(Value::Bool(*b)),
        (Ty::Int { .. }, JsonValue::Number(n)) => n.as_i64().map(Value::Int),
        (_, JsonValue::String(s)) => enc.parse_value(s),
        _ => None,
    }
}

fn type_json(ty: &Ty) -> JsonValue {
    match ty {
        Ty::Bool => json!({ "kind": "boolean" }),
        Ty::Enum(vals) => json!({ "kind": "enum", "values": vals.to_vec() }),
        Ty::Int { lo, hi } => json!({ "kind": "int", "lo": lo, "hi": hi }),
    }
}

fn kind_name(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Env => "env",
        VarKind::Sys => "sys",
    }
}

/// Declared variables of a controller, as listed when a session opens.
pub fn variables_json(c: &Controller) -> JsonValue {
    c.visible()
        .map(|e| json!({ "name": e.name, "kind": kind_name(e.kind), "type": type_json(&e.ty) }))
        .collect()
}

/// A state split into input and output values.
pub fn state_json(walk: &WalkSession, index: usize) -> JsonValue {
    match walk.state(index) {
        None => JsonValue::Null,
        Some(state) => {
            let (mut inputs, mut outputs) = (Map::new(), Map::new());
            for (name, kind, value) in state {
                let side = if kind == VarKind::Env { &mut inputs } else { &mut outputs };
                side.insert(name, value_to_json(&value));
            }
            json!({ "inputs": inputs, "outputs": outputs })
        }
    }
}

fn summary_json(walk: &WalkSession) -> JsonValue {
    json!({
        "started": walk.started(),
        "cursor": walk.cursor(),
        "historyLength": walk.history_len(),
        "current": state_json(walk, walk.cursor()),
    })
}

/// Parses a JSON object of input values against the session's inputs.
pub fn parse_inputs(walk: &WalkSession, j: &JsonValue) -> Result<Inputs, ApiError> {
    let obj = j
        .as_object()
        .ok_or_else(|| ApiError::BadRequest("`inputs` must be an object".into()))?;
    let mut inputs = Inputs::new();
    for (name, v) in obj {
        let enc = walk
            .controller()
            .inputs()
            .find(|e| &e.name == name)
            .ok_or_else(|| ApiError::from(WalkError::UnknownInput(name.clone())))?;
        let value = value_from_json(enc, v).ok_or_else(|| {
            ApiError::from(WalkError::BadValue { var: name.clone(), value: v.to_string() })
        })?;
        inputs.insert(name.clone(), value);
    }
    Ok(inputs)
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("malformed request body: {e}")))
}

async fn session(state: &AppState, id: &str) -> Result<Arc<tokio::sync::Mutex<Entry>>, ApiError> {
    state
        .registry
        .get(id)
        .ok_or_else(|| ApiError::NotFound(format!("no session `{id}`")))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateRequest {
    spec_path: Option<PathBuf>,
    spec_source: Option<String>,
    controller: Option<String>,
}

async fn create(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: CreateRequest = parse_body(&body)?;
    let (origin, job): (String, Box<dyn FnOnce() -> Result<Controller, String> + Send>) =
        match (req.spec_path, req.spec_source, req.controller) {
            (Some(p), None, None) => (
                p.display().to_string(),
                Box::new(move || controller_from_path(&p).map_err(|e| e.to_string())),
            ),
            (None, Some(src), None) => (
                "<upload>".to_string(),
                Box::new(move || controller_from_source(&src).map_err(|e| e.to_string())),
            ),
            (None, None, Some(b64)) => {
                let bytes = base64::engine::general_purpose::STANDARD
                    .decode(b64.trim())
                    .map_err(|e| ApiError::BadRequest(format!("controller is not valid base64: {e}")))?;
                ("<controller upload>".to_string(), Box::new(move || load(&bytes).map_err(|e| e.to_string())))
            }
            _ => {
                return Err(ApiError::BadRequest(
                    "give exactly one of `specPath`, `specSource` and `controller`".into(),
                ))
            }
        };
    let controller = tokio::task::spawn_blocking(job)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(ApiError::BadRequest)?;
    let variables = variables_json(&controller);
    let id = state.registry.insert(WalkSession::new(controller), origin.clone());
    let body = json!({ "id": id, "origin": origin, "variables": variables });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn remove(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    if state.registry.remove(&id) {
        Ok(StatusCode::NO_CONTENT.into_response())
    } else {
        Err(ApiError::NotFound(format!("no session `{id}`")))
    }
}

async fn state_of(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let entry = session(&state, &id).await?;
    let mut e = entry.lock().await;
    e.last_used = Instant::now();
    let mut body = summary_json(&e.walk);
    body["origin"] = JsonValue::String(e.origin.clone());
    Ok(Json(body).into_response())
}

async fn history(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let entry = session(&state, &id).await?;
    let mut e = entry.lock().await;
    e.last_used = Instant::now();
    let states: Vec<JsonValue> = (0..e.walk.history_len()).map(|i| state_json(&e.walk, i)).collect();
    Ok(Json(json!({ "cursor": e.walk.cursor(), "states": states })).into_response())
}

async fn env_options(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult {
    let cap = match query.get("cap") {
        None => DEFAULT_OPTION_CAP,
        Some(c) => c
            .parse()
            .map_err(|_| ApiError::BadRequest(format!("`cap` must be a non-negative integer, got `{c}`")))?,
    };
    let entry = session(&state, &id).await?;
    let mut e = entry.lock().await;
    e.last_used = Instant::now();
    let (options, truncated) = e.walk.env_options(cap);
    let options: Vec<JsonValue> = options
        .iter()
        .map(|o| o.iter().map(|(k, v)| (k.clone(), value_to_json(v))).collect::<Map<_, _>>().into())
        .collect();
    Ok(Json(json!({ "options": options, "truncated": truncated })).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    inputs: JsonValue,
}

async fn step(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let entry = session(&state, &id).await?;
    let req: StepRequest = parse_body(&body)?;
    let mut e = entry.lock().await;
    e.last_used = Instant::now();
    let inputs = parse_inputs(&e.walk, &req.inputs)?;
    let outputs = if e.walk.started() { e.walk.step(&inputs)? } else { e.walk.initial(&inputs)? };
    let outputs: Map<String, JsonValue> = outputs.iter().map(|(k, v)| (k.clone(), value_to_json(v))).collect();
    Ok(Json(json!({
        "outputs": outputs,
        "cursor": e.walk.cursor(),
        "historyLength": e.walk.history_len(),
    }))
    .into_response())
}

async fn back(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let entry = session(&state, &id).await?;
    let mut e = entry.lock().await;
    e.last_used = Instant::now();
    e.walk.back()?;
    Ok(Json(summary_json(&e.walk)).into_response())
}

async fn forward(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let entry = session(&state, &id).await?;
    let mut e = entry.lock().await;
    e.last_used = Instant::now();
    e.walk.forward()?;
    Ok(Json(summary_json(&e.walk)).into_response())
}

async fn trace(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let entry = session(&state, &id).await?;
    let mut e = entry.lock().await;
    e.last_used = Instant::now();
    let csv = e.walk.trace_csv();
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv).into_response())
}

/// Serves `router` on an already bound listener until the process ends.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.registry.expire();
        }
    });
    axum::serve(listener, router(state)).await
}
