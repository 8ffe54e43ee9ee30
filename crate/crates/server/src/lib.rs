//! HTTP facade: `POST /prove` runs a strategy on a problem; `GET /` and
//! `GET /app.js` serve the web front end.

use std::path::PathBuf;
use std::time::Duration;

use axum::Router;
use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{StatusCode, header};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use serde::{Deserialize, Serialize};
use termtpl_core::strategy::{headline, render_body};
use termtpl_core::{Outcome, ProveError, RunError, parse_strategy, parse_trs, prove};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

/// Requests larger than this are rejected with 413.
pub const MAX_BODY_BYTES: usize = 64 * 1024;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub default_timeout: Duration,
    /// Upper limit on client-requested timeouts.
    pub max_timeout: Duration,
    /// Directory with the built web front end; a placeholder page otherwise.
    pub web_root: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            default_timeout: Duration::from_secs(10),
            max_timeout: Duration::from_secs(60),
            web_root: None,
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct ProveRequest {
    pub problem: String,
    pub strategy: String,
    /// Seconds.
    #[serde(default)]
    pub timeout: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProveResponse {
    pub result: String,
    pub proof: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ErrorResponse {
    pub error: String,
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, axum::Json(ErrorResponse { error: msg.into() })).into_response()
}

pub fn app(cfg: ServerConfig) -> Router {
    let api = Router::new()
        .route("/prove", post(prove_handler))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(cfg.clone());
    let ui = match &cfg.web_root {
        Some(dir) => Router::new().fallback_service(ServeDir::new(dir)),
        None => Router::new()
            .route(
                "/",
                get(|| async {
                    (
                        [(header::CONTENT_TYPE, "text/html; charset=utf-8")],
                        PLACEHOLDER_HTML,
                    )
                }),
            )
            .route(
                "/app.js",
                get(|| async { ([(header::CONTENT_TYPE, "text/javascript")], PLACEHOLDER_JS) }),
            ),
    };
    api.merge(ui).layer(CorsLayer::permissive())
}

fn timeout_for(req: &ProveRequest, cfg: &ServerConfig) -> Result<Duration, String> {
    match req.timeout {
        None => Ok(cfg.default_timeout),
        Some(t) => Duration::try_from_secs_f64(t)
            .map(|d| d.min(cfg.max_timeout))
            .map_err(|_| format!("invalid timeout {t}")),
    }
}

async fn prove_handler(
    State(cfg): State<ServerConfig>,
    body: Result<Bytes, BytesRejection>,
) -> Response {
    let body = match body {
        Ok(b) => b,
        Err(rej) => return error(rej.status(), rej.body_text()),
    };
    let req: ProveRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid request: {e}")),
    };
    let time_limit = match timeout_for(&req, &cfg) {
        Ok(t) => t,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    match tokio::task::spawn_blocking(move || solve(&req, time_limit)).await {
        Ok(Ok(resp)) => (StatusCode::OK, axum::Json(resp)).into_response(),
        Ok(Err((status, msg))) => error(status, msg),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

/// The same pipeline as the command line, minus the I/O.
pub fn solve(
    req: &ProveRequest,
    time_limit: Duration,
) -> Result<ProveResponse, (StatusCode, String)> {
    let bad = |e: &dyn std::fmt::Display| (StatusCode::BAD_REQUEST, e.to_string());
    let trs = parse_trs(&req.problem).map_err(|e| bad(&e))?;
    let strategy = parse_strategy(&req.strategy).map_err(|e| bad(&e))?;
    let (mut cfg, tmpl) = strategy.compile(&trs).map_err(|e| bad(&e))?;
    cfg.time_limit = Some(time_limit);
    let outcome = prove(&trs, strategy.method, &cfg, tmpl.as_ref()).map_err(|e| match e {
        ProveError::UnsoundCertificate(_) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        other => bad(&RunError::Prove(other)),
    })?;
    Ok(ProveResponse {
        result: headline(&outcome).to_string(),
        proof: render_body(&trs, strategy.method, &outcome),
        reason: match outcome {
            Outcome::Maybe(r) => Some(r.to_string()),
            Outcome::Yes(_) => None,
        },
    })
}

const PLACEHOLDER_HTML: &str = r#"<!doctype html>
<html>
<head><meta charset="utf-8"><title>termtpl</title></head>
<body>
<h1>termtpl</h1>
<p>The web front end is not bundled with this server build. Start the server
with <code>--web-root &lt;dir&gt;</code> to serve it, or POST JSON
<code>{"problem": "...", "strategy": "kbo"}</code> to <code>/prove</code>.</p>
<script src="app.js"></script>
</body>
</html>
"#;

const PLACEHOLDER_JS: &str = "// front end not bundled\n";
