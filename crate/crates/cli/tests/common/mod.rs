//! Helpers shared by the command-line and service tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use greenflops::{app, AppState};
use http_body_util::BodyExt;
use tower::ServiceExt;

pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn greenflops(args: &[&str]) -> CliOutput {
    let out = Command::new(env!("CARGO_BIN_EXE_greenflops"))
        .args(args)
        .stdin(Stdio::null())
        .output()
        .expect("binary runs");
    CliOutput {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("UTF-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("UTF-8 stderr"),
    }
}

pub struct HttpOutput {
    pub status: StatusCode,
    pub content_type: Option<String>,
    pub body: String,
}

pub async fn request(method: &str, uri: &str, body: Option<(&str, Vec<u8>)>) -> HttpOutput {
    let builder = Request::builder().method(method).uri(uri);
    let req = match body {
        Some((content_type, bytes)) => builder
            .header("content-type", content_type)
            .body(Body::from(bytes))
            .unwrap(),
        None => builder.body(Body::empty()).unwrap(),
    };
    let resp = app(AppState::default()).oneshot(req).await.expect("infallible");
    let status = resp.status();
    let content_type = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    HttpOutput {
        status,
        content_type,
        body: String::from_utf8(bytes.to_vec()).expect("UTF-8 body"),
    }
}

pub fn http(method: &str, uri: &str, body: Option<(&str, Vec<u8>)>) -> HttpOutput {
    tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .unwrap()
        .block_on(request(method, uri, body))
}

pub fn post_json(uri: &str, body: &[u8]) -> HttpOutput {
    http("POST", uri, Some(("application/json", body.to_vec())))
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Golden {
    pub name: String,
    /// `analyze`, `compare` or `curve`.
    pub command: String,
    pub path: PathBuf,
    pub body: Vec<u8>,
}

pub fn golden_requests() -> Vec<Golden> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(golden_dir().join("requests"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|path| {
            let name = path.file_stem().unwrap().to_str().unwrap().to_string();
            let command = name.split('-').nth(1).unwrap().to_string();
            let body = std::fs::read(&path).unwrap();
            Golden { name, command, path, body }
        })
        .collect()
}

/// Runs a golden request through both front ends. Returns the CLI payload
/// (stdout on success, stderr on failure), the HTTP body, and whether both
/// agree on success.
pub fn run_golden(g: &Golden) -> (String, String, bool) {
    let cli = greenflops(&[&g.command, "--request", g.path.to_str().unwrap(), "--format", "json"]);
    let http = post_json(&format!("/api/v1/{}", g.command), &g.body);
    let cli_payload = if cli.code == 0 { cli.stdout } else { cli.stderr };
    let same_outcome = (cli.code == 0) == http.status.is_success();
    (cli_payload, http.body, same_outcome)
}
