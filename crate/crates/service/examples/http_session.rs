//! Drive the HTTP routes in process: create a session, walk a few steps, query and explain.

use axum::body::Body;
use axum::http::{Method, Request};
use hitori_service::api::{router, AppState};
use hitori_service::explain::Explainer;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

async fn call(app: &axum::Router, method: Method, uri: &str, body: &str) -> Value {
    let req = Request::builder()
        .method(method.clone())
        .uri(uri)
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let doc: Value = serde_json::from_slice(&bytes).unwrap();
    println!("{method} {uri} -> {status}");
    doc
}

#[tokio::main]
async fn main() {
    let app = router(AppState::new(Explainer::offline()), None);
    let grid = "5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2";
    let created = call(&app, Method::POST, "/api/puzzles", grid).await;
    let id = created["id"].as_str().unwrap();
    println!("{} steps", created["stepCount"]);
    for k in 1..=5 {
        let s = call(
            &app,
            Method::GET,
            &format!("/api/puzzles/{id}/steps/{k}"),
            "",
        )
        .await;
        println!("  {} is {}", s["step"]["cell"], s["step"]["value"]);
    }
    let q = call(
        &app,
        Method::POST,
        &format!("/api/puzzles/{id}/query"),
        r#"{"cell":"r1c2"}"#,
    )
    .await;
    println!("  r1c2: {} by {}", q["result"], q["technique"]);
    let p = call(
        &app,
        Method::GET,
        &format!("/api/puzzles/{id}/steps/11"),
        "",
    )
    .await;
    println!("{}", p["step"]["picture"]["ascii"].as_str().unwrap());
    let e = call(
        &app,
        Method::POST,
        &format!("/api/puzzles/{id}/steps/16/explain"),
        r#"{"historyMode":"full"}"#,
    )
    .await;
    println!("  {}", e["explanation"]["text"]);
    call(&app, Method::DELETE, &format!("/api/puzzles/{id}"), "").await;
}
