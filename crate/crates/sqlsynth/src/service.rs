//! JSON-over-HTTP access to the synthesizer for the web editor.
//!
//! `POST /api/synthesize` takes a problem document with inline rows and
//! answers `{"status", "sql", "dsl", "elapsed_ms", "error"}`. Every request
//! runs its own search on the blocking pool; nothing is shared between them.

use std::net::SocketAddr;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value as JsonValue};
use sqlsynth_core::{synthesize, Problem};
use tower_http::cors::CorsLayer;

use crate::clock::Stopwatch;
use crate::problem_file;

pub const DEFAULT_TIMEOUT_CAP_MS: u64 = 5_000;
pub const MAX_BODY_BYTES: usize = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub struct ServiceConfig {
    /// Upper bound on any request's search budget; also the budget when a
    /// request names none.
    pub timeout_cap_ms: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { timeout_cap_ms: DEFAULT_TIMEOUT_CAP_MS }
    }
}

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/api/synthesize", post(synthesize_handler))
        .route("/api/health", get(health))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .layer(CorsLayer::permissive())
        .with_state(config)
}

pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config)).await
}

async fn health() -> Json<JsonValue> {
    Json(json!({ "ok": true }))
}

fn invalid(error: String) -> Response {
    let body = json!({ "status": "invalid", "sql": null, "dsl": null, "elapsed_ms": 0, "error": error });
    (StatusCode::BAD_REQUEST, Json(body)).into_response()
}

/// Decodes and validates a request body, clamping its budget to `cap_ms`.
pub fn decode_request(body: &[u8], cap_ms: u64) -> Result<Problem, String> {
    let doc: JsonValue = serde_json::from_slice(body).map_err(|e| format!("malformed JSON: {e}"))?;
    let mut problem = problem_file::from_json(&doc, None).map_err(|e| e.to_string())?;
    problem.validate().map_err(|e| e.to_string())?;
    let named = doc.pointer("/config/timeout_ms").is_some();
    problem.config.timeout_ms = if named { problem.config.timeout_ms.min(cap_ms) } else { cap_ms };
    Ok(problem)
}

async fn synthesize_handler(State(config): State<ServiceConfig>, body: Bytes) -> Response {
    let problem = match decode_request(&body, config.timeout_cap_ms) {
        Ok(p) => p,
        Err(e) => return invalid(e),
    };
    let run = tokio::task::spawn_blocking(move || {
        let clock = Stopwatch::start();
        synthesize(&problem, &clock, &mut ())
    });
    match run.await {
        Ok(r) => Json(json!({
            "status": r.status.name(),
            "sql": r.sql,
            "dsl": r.program.map(|p| p.to_string()),
            "elapsed_ms": r.stats.elapsed_ms,
            "error": null,
        }))
        .into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "status": "error", "error": e.to_string() })))
            .into_response(),
    }
}
