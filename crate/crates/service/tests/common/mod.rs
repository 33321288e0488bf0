//! Shared data and a stand-in chat endpoint for integration tests.
#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::routing::post;
use axum::{Json, Router};
use hitori_core::grid::parse_puzzle;
use hitori_core::staging::{stage, StagingPlan};
use serde_json::{json, Value};

pub const P63: &str = "5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2\n";

pub const R2C1_PICTURE: &str = ". . x . .\nx . . . x\n. . X . .\n. x - x .\nx - - - x";

pub const TEMPLATE_FIXTURE: &str = include_str!("../fixtures/prompt_template.txt");

pub fn p63_plan() -> &'static StagingPlan {
    static PLAN: OnceLock<StagingPlan> = OnceLock::new();
    PLAN.get_or_init(|| stage(&parse_puzzle(P63).unwrap()).unwrap())
}

#[derive(Clone, Default)]
pub struct MockLog {
    pub hits: Arc<AtomicUsize>,
    pub bodies: Arc<Mutex<Vec<Value>>>,
    pub auth: Arc<Mutex<Vec<String>>>,
}

impl MockLog {
    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

#[derive(Clone)]
struct Mock {
    log: MockLog,
    status: StatusCode,
    reply: String,
}

async fn complete(
    State(m): State<Mock>,
    headers: HeaderMap,
    Json(body): Json<Value>,
) -> (StatusCode, Json<Value>) {
    m.log.hits.fetch_add(1, Ordering::SeqCst);
    m.log.bodies.lock().unwrap().push(body);
    if let Some(a) = headers.get("authorization") {
        m.log
            .auth
            .lock()
            .unwrap()
            .push(a.to_str().unwrap().to_string());
    }
    if !m.status.is_success() {
        return (m.status, Json(json!({ "error": "mock failure" })));
    }
    (
        m.status,
        Json(
            json!({ "choices": [{ "index": 0, "message": { "role": "assistant", "content": m.reply } }] }),
        ),
    )
}

/// Serves `/chat/completions` on a free local port, answering every request with `status`.
pub async fn mock_endpoint(status: u16, reply: &str) -> (String, MockLog) {
    let log = MockLog::default();
    let app = Router::new()
        .route("/chat/completions", post(complete))
        .with_state(Mock {
            log: log.clone(),
            status: StatusCode::from_u16(status).unwrap(),
            reply: reply.to_string(),
        });
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0)))
        .await
        .unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (format!("http://{addr}"), log)
}
