//! HTTP routes over sessions. Every JSON body carries a `meta` block with the naming rules.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use hitori_core::grid::{CellRef, CellStatus, PuzzleError, ShadingState};
use hitori_core::staging::PictureExport;
use hitori_core::staging::{
    stage, QueryError, QueryResult, StageContext, StagingError, StagingPlan, StepExport,
    StepRecord, Technique,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::explain::{ExplainError, Explainer, HistoryMode};
use crate::session::{Session, SessionStore};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Meta {
    pub cell_naming: String,
    pub variable_naming: String,
    pub step_indexing: String,
}

impl Default for Meta {
    fn default() -> Self {
        Meta {
            cell_naming: "rRcC with 1-based row R and column C; r1c1 is the top-left cell"
                .to_string(),
            variable_naming: "cRR_CC is true when cell rRcC is unshaded".to_string(),
            step_indexing: "steps are numbered from 1; state k is the board after k steps"
                .to_string(),
        }
    }
}

fn with_meta(mut body: Value) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert(
            "meta".to_string(),
            serde_json::to_value(Meta::default()).expect("plain data serializes"),
        );
    }
    body
}

fn json_response(status: StatusCode, body: Value) -> Response {
    (status, axum::Json(with_meta(body))).into_response()
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
    details: Option<Value>,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            kind,
            message: message.into(),
            details: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "malformed", message)
    }

    fn no_session(id: &str) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "unknownSession",
            format!("no session {id}"),
        )
    }

    fn no_step(k: usize, len: usize) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "unknownStep",
            format!("step {k} is out of range (plan has {len} steps)"),
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut error = json!({ "kind": self.kind, "message": self.message });
        if let Some(d) = self.details {
            error["details"] = d;
        }
        json_response(self.status, json!({ "error": error }))
    }
}

impl From<StagingError> for ApiError {
    fn from(e: StagingError) -> Self {
        let message = e.to_string();
        match e {
            StagingError::NoSolution => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "noSolution", message)
            }
            StagingError::NonUniqueSolution { differing, .. } => ApiError {
                details: Some(json!({ "differing": names(&differing) })),
                ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "nonUnique", message)
            },
            StagingError::StrongProofRequired(_) => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "strongProofRequired",
                message,
            ),
            StagingError::NonUnitUnsat(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "nonUnitUnsat", message)
            }
            StagingError::IndexOutOfRange { index, len } => ApiError::no_step(index, len),
        }
    }
}

impl From<PuzzleError> for ApiError {
    fn from(e: PuzzleError) -> Self {
        ApiError::bad_request(e.to_string())
    }
}

fn names(cells: &[CellRef]) -> Vec<String> {
    cells.iter().map(CellRef::to_string).collect()
}

pub fn status_rows(state: &ShadingState) -> Vec<Vec<CellStatus>> {
    state.status_rows()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StepSummary {
    index: usize,
    cell: String,
    value: &'static str,
    technique: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TotalsDoc {
    weak_steps: usize,
    picture_steps: usize,
    total_chars: usize,
    max_chars: usize,
    mean_chars: f64,
}

/// The plan document served by `GET /plan`. Depends on the plan alone.
pub fn plan_document(plan: &StagingPlan) -> Value {
    let steps: Vec<StepSummary> = plan
        .steps
        .iter()
        .map(|s| {
            let (technique, size, verdict) = match &s.technique {
                Technique::WeakProof { size, .. } => ("weak", Some(*size), None),
                Technique::Picture(p) => ("picture", None, Some(PictureExport::new(p).verdict)),
            };
            StepSummary {
                index: s.index,
                cell: s.subgoal.cell.to_string(),
                value: s.subgoal.value_word(),
                technique,
                size,
                verdict,
            }
        })
        .collect();
    let t = plan.totals;
    with_meta(json!({
        "rows": plan.grid.rows(),
        "cols": plan.grid.cols(),
        "symbols": plan.grid.symbol_rows(),
        "stepCount": plan.steps.len(),
        "steps": steps,
        "totals": TotalsDoc {
            weak_steps: t.weak_steps,
            picture_steps: t.picture_steps,
            total_chars: t.total_chars,
            max_chars: t.max_chars,
            mean_chars: t.mean_chars(),
        },
    }))
}

/// Full record of one step.
pub fn step_document(step: &StepRecord) -> Value {
    json!({
        "step": StepExport::new(step),
        "text": step.display_text(),
        "before": status_rows(&step.before),
        "after": status_rows(&step.after),
    })
}

#[derive(Clone)]
pub struct AppState {
    pub sessions: Arc<SessionStore>,
    pub explainer: Arc<Explainer>,
}

impl AppState {
    pub fn new(explainer: Explainer) -> Self {
        AppState {
            sessions: Arc::new(SessionStore::default()),
            explainer: Arc::new(explainer),
        }
    }
}

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/puzzles", post(create))
        .route("/api/puzzles/{id}", axum::routing::delete(delete_session))
        .route("/api/puzzles/{id}/plan", get(plan))
        .route("/api/puzzles/{id}/steps/{k}", get(step))
        .route("/api/puzzles/{id}/state/{k}", get(board))
        .route("/api/puzzles/{id}/query", post(query))
        .route("/api/puzzles/{id}/steps/{k}/explain", post(explain))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(
    addr: SocketAddr,
    state: AppState,
    static_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn session(state: &AppState, id: &str) -> Result<Arc<Session>, ApiError> {
    state
        .sessions
        .get(id)
        .ok_or_else(|| ApiError::no_session(id))
}

fn step_number(text: &str) -> Result<usize, ApiError> {
    text.parse()
        .map_err(|_| ApiError::bad_request(format!("step index {text:?} is not a number")))
}

fn parse_body<T: for<'de> Deserialize<'de> + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("bad JSON body: {e}")))
}

#[derive(Deserialize)]
struct CreateBody {
    grid: String,
}

/// Body is either `{"grid": "..."}` or the grid text itself.
async fn create(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body)
        .map_err(|_| ApiError::bad_request("body is not UTF-8"))?
        .to_string();
    let grid_text = if text.trim_start().starts_with('{') {
        serde_json::from_str::<CreateBody>(&text)
            .map_err(|e| ApiError::bad_request(format!("bad JSON body: {e}")))?
            .grid
    } else {
        text
    };
    let grid = hitori_core::grid::parse_puzzle(&grid_text)?;
    let plan = tokio::task::spawn_blocking(move || stage(&grid))
        .await
        .map_err(|e| {
            ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
        })??;
    let doc = serde_json::to_string(&plan_document(&plan)).expect("plain data serializes");
    let s = state.sessions.insert(plan, doc);
    Ok(json_response(
        StatusCode::CREATED,
        json!({
            "id": s.id,
            "rows": s.plan.grid.rows(),
            "cols": s.plan.grid.cols(),
            "stepCount": s.plan.steps.len(),
            "pictureSteps": s.plan.totals.picture_steps,
        }),
    ))
}

async fn delete_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    if !state.sessions.remove(&id) {
        return Err(ApiError::no_session(&id));
    }
    Ok(json_response(StatusCode::OK, json!({ "deleted": id })))
}

async fn plan(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = session(&state, &id)?;
    Ok((
        [(axum::http::header::CONTENT_TYPE, "application/json")],
        s.plan_doc.clone(),
    )
        .into_response())
}

/// Revealing step k moves the cursor to k.
async fn step(
    State(state): State<AppState>,
    Path((id, k)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let s = session(&state, &id)?;
    let k = step_number(&k)?;
    let len = s.plan.steps.len();
    if k == 0 || k > len {
        return Err(ApiError::no_step(k, len));
    }
    s.state.lock().await.cursor = k;
    Ok(json_response(
        StatusCode::OK,
        step_document(&s.plan.steps[k - 1]),
    ))
}

/// Showing the board after k steps moves the cursor to k.
async fn board(
    State(state): State<AppState>,
    Path((id, k)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let s = session(&state, &id)?;
    let k = step_number(&k)?;
    let len = s.plan.steps.len();
    if k > len {
        return Err(ApiError::no_step(k, len));
    }
    s.state.lock().await.cursor = k;
    let board = hitori_core::staging::board_state_after(&s.plan, k)?;
    let latest = (k > 0).then(|| s.plan.steps[k - 1].subgoal.cell.to_string());
    Ok(json_response(
        StatusCode::OK,
        json!({
            "step": k,
            "rows": s.plan.grid.rows(),
            "cols": s.plan.grid.cols(),
            "symbols": s.plan.grid.symbol_rows(),
            "statuses": status_rows(&board),
            "latest": latest,
        }),
    ))
}

#[derive(Deserialize, Default)]
struct QueryBody {
    cell: Option<String>,
    /// Stage to query at; the session cursor when absent.
    step: Option<usize>,
}

async fn query(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let s = session(&state, &id)?;
    let body: QueryBody = parse_body(&body)?;
    let name = body
        .cell
        .ok_or_else(|| ApiError::bad_request("body needs a \"cell\" field"))?;
    let cell: CellRef = name.parse()?;
    let at = match body.step {
        Some(k) => k,
        None => s.state.lock().await.cursor,
    };
    let plan_session = Arc::clone(&s);
    let result = tokio::task::spawn_blocking(move || {
        let ctx = StageContext::at_step(&plan_session.plan, at)?;
        Ok::<_, StagingError>(ctx.query_cell(cell))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    let result = match result {
        Ok(r) => r,
        Err(QueryError::OutOfBounds(c)) => {
            return Err(ApiError::bad_request(format!("{c} is outside the grid")));
        }
        Err(QueryError::AlreadyResolved(c)) => {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "alreadyResolved",
                format!("{c} is already resolved"),
            ));
        }
    };
    let body = match result {
        QueryResult::Derived {
            subgoal,
            technique,
            reasons,
        } => {
            let mut doc = json!({
                "step": at,
                "cell": subgoal.cell.to_string(),
                "value": subgoal.value_word(),
                "result": "derived",
                "reasons": reasons,
            });
            match &technique {
                Technique::WeakProof { proof, size } => {
                    doc["technique"] = json!("weak");
                    doc["proof"] = json!(proof.serialize());
                    doc["size"] = json!(size);
                }
                Technique::Picture(p) => {
                    doc["technique"] = json!("picture");
                    doc["picture"] =
                        serde_json::to_value(PictureExport::new(p)).expect("plain data serializes");
                }
            }
            doc
        }
        QueryResult::NotYetDerivable {
            subgoal,
            counterexample,
            violates,
        } => json!({
            "step": at,
            "cell": subgoal.cell.to_string(),
            "value": subgoal.value_word(),
            "result": "notYetDerivable",
            "counterexample": counterexample.as_ref().map(status_rows),
            "violates": violates.map(|r| r.to_string()),
        }),
    };
    Ok(json_response(StatusCode::OK, body))
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase")]
struct ExplainBody {
    #[serde(default)]
    history_mode: HistoryMode,
    #[serde(default)]
    offline: bool,
}

async fn explain(
    State(state): State<AppState>,
    Path((id, k)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let s = session(&state, &id)?;
    let k = step_number(&k)?;
    let len = s.plan.steps.len();
    if k == 0 || k > len {
        return Err(ApiError::no_step(k, len));
    }
    let body: ExplainBody = parse_body(&body)?;
    let offline = body.offline || !state.explainer.has_endpoint();
    let key = (k, body.history_mode, offline);
    let mut guard = s.state.lock().await;
    if let Some(e) = guard.explanations.get(&key) {
        return Ok(json_response(StatusCode::OK, json!({ "explanation": e })));
    }
    let explanation = state
        .explainer
        .explain_step(&s.plan.steps[k - 1], body.history_mode, offline)
        .await
        .map_err(|e| match e {
            ExplainError::Endpoint(err) => ApiError {
                details: Some(json!({ "status": err.status, "body": err.body })),
                ..ApiError::new(StatusCode::BAD_GATEWAY, "endpointError", err.to_string())
            },
            other => ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "internal",
                other.to_string(),
            ),
        })?;
    guard.explanations.insert(key, explanation.clone());
    Ok(json_response(
        StatusCode::OK,
        json!({ "explanation": explanation }),
    ))
}
