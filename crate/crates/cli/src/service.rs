//! JSON-over-HTTP facade for suggestion and translation.
//!
//! Handlers are plain functions from request bytes to a status and a JSON
//! body; the axum router only wires them up.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use m2c_core::querier::{translate_query, DeveloperQuery, QueryError, RenderedResult};
use m2c_core::translator::{TranslationModel, FORMAT_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

pub const DEFAULT_BEAM: usize = 10;
pub const DEFAULT_K: usize = 5;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuggestRequest {
    text: String,
    #[serde(default = "default_k")]
    k: usize,
}

fn default_k() -> usize {
    DEFAULT_K
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TranslateRequest {
    #[serde(default)]
    chosen_name: Option<String>,
    #[serde(default)]
    name_text: Option<String>,
    #[serde(default)]
    variables: Vec<String>,
    #[serde(default)]
    words: Vec<String>,
    #[serde(default)]
    context: Vec<String>,
    #[serde(default)]
    beam: Option<usize>,
}

#[derive(Debug, Serialize)]
struct PlaceholderJson<'a> {
    kind: &'a str,
    #[serde(rename = "type")]
    type_name: Option<&'a str>,
    position: usize,
}

fn error(status: StatusCode, message: impl std::fmt::Display) -> (StatusCode, Value) {
    (status, json!({ "error": message.to_string() }))
}

pub fn health() -> (StatusCode, Value) {
    (StatusCode::OK, json!({ "status": "ok", "model_version": FORMAT_VERSION }))
}

pub fn handle_suggest(model: &TranslationModel, body: &[u8]) -> (StatusCode, Value) {
    let req: SuggestRequest = match serde_json::from_slice(body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed request: {e}")),
    };
    if req.k == 0 {
        return error(StatusCode::BAD_REQUEST, "k must be at least 1");
    }
    let suggestions = match model.names.suggest(&req.text, req.k) {
        Ok(s) => s,
        Err(QueryError::EmptyIndex) => Vec::new(),
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let list: Vec<Value> = suggestions
        .iter()
        .map(|s| json!({ "name": s.name, "score": s.score, "frequency": s.frequency }))
        .collect();
    (StatusCode::OK, json!({ "suggestions": list }))
}

pub fn rendered_json(r: &RenderedResult) -> Value {
    let placeholders: Vec<PlaceholderJson> = r
        .placeholders
        .iter()
        .map(|p| PlaceholderJson { kind: p.kind.as_str(), type_name: p.type_name.as_deref(), position: p.position })
        .collect();
    json!({
        "display": r.display,
        "raw_target": r.raw_target,
        "placeholders": placeholders,
        "score": r.score,
        "renderable": r.renderable,
    })
}

pub fn handle_translate(model: &TranslationModel, body: &[u8]) -> (StatusCode, Value) {
    let req: TranslateRequest = match serde_json::from_slice(body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed request: {e}")),
    };
    let beam = req.beam.unwrap_or(DEFAULT_BEAM);
    if beam == 0 {
        return error(StatusCode::BAD_REQUEST, "beam must be at least 1");
    }
    let chosen = match (req.chosen_name.filter(|n| !n.is_empty()), req.name_text) {
        (Some(name), _) => name,
        (None, Some(text)) => match model.names.suggest(&text, 1) {
            Ok(s) if !s.is_empty() => s[0].name.clone(),
            _ => return error(StatusCode::BAD_REQUEST, format!("no known method name matches {text:?}")),
        },
        (None, None) => return error(StatusCode::BAD_REQUEST, "one of chosen_name or name_text is required"),
    };
    let query = DeveloperQuery {
        name_text: None,
        chosen_name: Some(chosen.clone()),
        variables: req.variables,
        words: req.words,
        context: req.context,
    };
    match translate_query(model, &query, beam) {
        Ok(r) => {
            let mut body = rendered_json(&r);
            body["chosen_name"] = Value::String(chosen);
            (StatusCode::OK, body)
        }
        Err(e) => error(StatusCode::BAD_REQUEST, e),
    }
}

type Shared = Arc<TranslationModel>;

fn reply((status, body): (StatusCode, Value)) -> impl IntoResponse {
    (status, Json(body))
}

/// Routes: `GET /health`, `POST /suggest`, `POST /translate`, with
/// permissive CORS so a browser front end on another origin can call them.
pub fn router(model: Shared) -> Router {
    Router::new()
        .route("/health", get(|| async { reply(health()) }))
        .route("/suggest", post(|State(m): State<Shared>, body: Bytes| async move { reply(handle_suggest(&m, &body)) }))
        .route(
            "/translate",
            post(|State(m): State<Shared>, body: Bytes| async move { reply(handle_translate(&m, &body)) }),
        )
        .layer(CorsLayer::permissive())
        .with_state(model)
}
