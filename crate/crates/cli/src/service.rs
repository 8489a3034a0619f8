//! The `/api/v1` JSON service.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use greenflops_core::analysis::{self, render_json};
use greenflops_core::error::ErrorBody;
use greenflops_core::hardware::ProfileDb;
use greenflops_core::spec_io::{ProfileDocument, FORMAT_VERSION};
use greenflops_core::{Error, ErrorObject};
use serde_json::json;

#[derive(Clone)]
pub struct AppState {
    pub db: Arc<ProfileDb>,
}

impl AppState {
    pub fn new(db: ProfileDb) -> Self {
        Self { db: Arc::new(db) }
    }
}

impl Default for AppState {
    fn default() -> Self {
        Self::new(ProfileDb::builtin().clone())
    }
}

pub fn app(state: AppState) -> Router {
    let api = Router::new()
        .route("/analyze", post(analyze))
        .route("/compare", post(compare))
        .route("/curve", post(curve))
        .route("/hardware", get(hardware_list))
        .route("/hardware/{id}", get(hardware_show))
        .route("/zoo", get(zoo_list))
        .route("/zoo/{id}", get(zoo_show))
        .route("/health", get(health));
    Router::new()
        .nest("/api/v1", api)
        .fallback(not_found)
        .with_state(state)
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn ok<T: serde::Serialize>(value: &T) -> Response {
    json_response(StatusCode::OK, render_json(value))
}

fn error_response(status: StatusCode, error: ErrorObject) -> Response {
    json_response(status, render_json(&ErrorBody { error }))
}

fn failure(e: &Error) -> Response {
    let status = StatusCode::from_u16(e.http_status()).unwrap_or(StatusCode::BAD_REQUEST);
    error_response(status, e.to_object())
}

fn is_json(headers: &HeaderMap) -> bool {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.split(';').next())
        .map(|m| m.trim().eq_ignore_ascii_case("application/json"))
        .unwrap_or(false)
}

/// Enforces the content type and decodes the body, or builds the error
/// response.
fn decode<T: serde::de::DeserializeOwned>(headers: &HeaderMap, body: &Bytes) -> Result<T, Response> {
    if !is_json(headers) {
        return Err(error_response(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            ErrorObject {
                code: "unsupported_media_type".into(),
                message: "request body must be sent as application/json".into(),
                location: None,
            },
        ));
    }
    serde_json::from_slice(body).map_err(|e| failure(&Error::Request(e.to_string())))
}

async fn analyze(State(s): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    match decode(&headers, &body) {
        Ok(req) => analysis::analyze(&req, &s.db).map_or_else(|e| failure(&e), |r| ok(&r)),
        Err(resp) => resp,
    }
}

async fn compare(State(s): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    match decode(&headers, &body) {
        Ok(req) => analysis::compare(&req, &s.db).map_or_else(|e| failure(&e), |r| ok(&r)),
        Err(resp) => resp,
    }
}

async fn curve(State(s): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    match decode(&headers, &body) {
        Ok(req) => analysis::curve(&req, &s.db).map_or_else(|e| failure(&e), |r| ok(&r)),
        Err(resp) => resp,
    }
}

pub fn profile_document(db: &ProfileDb) -> ProfileDocument {
    ProfileDocument {
        format_version: FORMAT_VERSION.into(),
        profiles: db.profiles().to_vec(),
    }
}

async fn hardware_list(State(s): State<AppState>) -> Response {
    ok(&profile_document(&s.db))
}

async fn hardware_show(State(s): State<AppState>, Path(id): Path<String>) -> Response {
    match s.db.get(&id) {
        Ok(p) => ok(&analysis::hardware_info(p)),
        Err(e) => failure(&e.into()),
    }
}

async fn zoo_list() -> Response {
    ok(&analysis::zoo_summaries())
}

async fn zoo_show(Path(id): Path<String>) -> Response {
    analysis::zoo_detail(&id).map_or_else(|e| failure(&e), |d| ok(&d))
}

pub fn health_body() -> serde_json::Value {
    json!({ "status": "ok", "version": greenflops_core::VERSION })
}

async fn health() -> Response {
    ok(&health_body())
}

async fn not_found() -> Response {
    error_response(
        StatusCode::NOT_FOUND,
        ErrorObject {
            code: "not_found".into(),
            message: "no such route".into(),
            location: None,
        },
    )
}

/// Binds and serves until interrupted.
pub async fn serve(state: AppState, bind: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((bind, port)).await?;
    eprintln!("greenflops: listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
