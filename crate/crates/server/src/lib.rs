//! HTTP annotation service: proposes internal structure for marked spans.
//!
//! | method | path              | body                                   |
//! |--------|-------------------|----------------------------------------|
//! | POST   | `/v1/parse-span`  | `{"tags": [...], "words"?: [...], "mode"?: "span" \| "sentence"}` |
//! | POST   | `/v1/chunk`       | same, always sentence mode             |
//! | GET    | `/v1/model`       |                                        |
//! | POST   | `/v1/save`        | `{"trees": ["(NP (ART der) (NN Mann))", ...]}` |
//!
//! Errors come back as `{"error": "..."}`.

use std::io;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;

use structag::corpus::{append_columnar, TaggedSentence};
use structag::decoder::{parse_span, ViterbiOptions};
use structag::source::ProbSource;
use structag::treebank::{encode_tree, parse_sentence, validate_tree, Child, PosTag};

/// Shared, read-only service state.
pub struct AppState {
    pub source: Option<Arc<dyn ProbSource>>,
    /// Columnar file accepted trees are appended to; `None` disables saving.
    pub save_path: Option<PathBuf>,
    pub viterbi: ViterbiOptions,
    write_lock: Mutex<()>,
}

impl AppState {
    pub fn new(source: Option<Arc<dyn ProbSource>>, save_path: Option<PathBuf>) -> Self {
        AppState {
            source,
            save_path,
            viterbi: ViterbiOptions::default(),
            write_lock: Mutex::new(()),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(r.status(), r.body_text())
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: self.message })).into_response()
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SpanMode {
    #[default]
    Span,
    Sentence,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SpanRequest {
    pub tags: Vec<String>,
    #[serde(default)]
    pub words: Option<Vec<Option<String>>>,
    #[serde(default)]
    pub mode: SpanMode,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct RepairInfo {
    pub position: usize,
    pub kind: String,
    pub original: String,
    pub applied: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct ChunkInfo {
    pub start: usize,
    pub end: usize,
    pub label: String,
    pub tree: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct SpanResponse {
    /// Structural tags as `TAG/REL/CAT`.
    pub tags: Vec<String>,
    pub tree: String,
    pub repairs: Vec<RepairInfo>,
    pub candidates: Vec<usize>,
    /// Positions whose POS tag the model has never seen.
    pub unknown: Vec<usize>,
    pub score: f64,
    /// Sentence mode only: top-level chunks and out-of-chunk positions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chunks: Option<Vec<ChunkInfo>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outside: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct ModelInfo {
    pub kind: String,
    pub futures: usize,
    pub tags: Vec<String>,
    pub labels: Vec<String>,
    pub features: Option<usize>,
    pub iterations: Option<usize>,
    pub log_likelihood: Vec<f64>,
    pub lambdas: Option<[f64; 3]>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SaveRequest {
    pub trees: Vec<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct SaveResponse {
    pub saved: usize,
}

fn model(state: &AppState) -> Result<&dyn ProbSource, ApiError> {
    state
        .source
        .as_deref()
        .ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no model loaded"))
}

/// Decodes one request against `source`; shared by the handlers and usable
/// without a running server.
pub fn annotate(source: &dyn ProbSource, req: &SpanRequest, viterbi: ViterbiOptions) -> Result<SpanResponse, ApiError> {
    if req.tags.is_empty() {
        return Err(ApiError::bad_request("empty span: at least one POS tag is required"));
    }
    let pos: Vec<PosTag> = req
        .tags
        .iter()
        .map(|t| PosTag::new(t.as_str()).map_err(|e| ApiError::bad_request(e.to_string())))
        .collect::<Result<_, _>>()?;
    let words = req.words.clone().unwrap_or_default();
    if !words.is_empty() && words.len() != pos.len() {
        return Err(ApiError::bad_request(format!(
            "{} words given for {} tags",
            words.len(),
            pos.len()
        )));
    }
    let parse = parse_span(source, &pos, &words, viterbi).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let known = source.futures();
    let unknown = pos
        .iter()
        .enumerate()
        .filter(|(_, p)| known.with_pos(p).is_empty())
        .map(|(i, _)| i)
        .collect();
    let (chunks, outside) = match req.mode {
        SpanMode::Span => (None, None),
        SpanMode::Sentence => {
            let t = &parse.tree;
            let mut chunks = Vec::new();
            let mut outside = Vec::new();
            for &c in &t.top {
                match c {
                    Child::Leaf(l) => outside.push(l),
                    Child::Node(n) => {
                        let (start, end) = t.span(c);
                        chunks.push(ChunkInfo {
                            start,
                            end,
                            label: t.nodes[n].label.to_string(),
                            tree: t.subtree(c).to_bracketed(),
                        });
                    }
                }
            }
            (Some(chunks), Some(outside))
        }
    };
    Ok(SpanResponse {
        tags: parse.tags.iter().map(ToString::to_string).collect(),
        tree: parse.tree.to_bracketed(),
        repairs: parse
            .repairs
            .iter()
            .map(|r| RepairInfo {
                position: r.position,
                kind: format!("{:?}", r.kind),
                original: r.original.to_string(),
                applied: r.applied.to_string(),
            })
            .collect(),
        candidates: parse.candidates,
        unknown,
        score: parse.score,
        chunks,
        outside,
    })
}

async fn parse_span_handler(
    State(state): State<Arc<AppState>>,
    body: Result<Json<SpanRequest>, JsonRejection>,
) -> Result<Json<SpanResponse>, ApiError> {
    let src = model(&state)?;
    let Json(req) = body?;
    annotate(src, &req, state.viterbi).map(Json)
}

async fn chunk_handler(
    State(state): State<Arc<AppState>>,
    body: Result<Json<SpanRequest>, JsonRejection>,
) -> Result<Json<SpanResponse>, ApiError> {
    let src = model(&state)?;
    let Json(mut req) = body?;
    req.mode = SpanMode::Sentence;
    annotate(src, &req, state.viterbi).map(Json)
}

async fn model_handler(State(state): State<Arc<AppState>>) -> Result<Json<ModelInfo>, ApiError> {
    let i = model(&state)?.info();
    Ok(Json(ModelInfo {
        kind: i.kind,
        futures: i.futures,
        tags: i.tags,
        labels: i.labels,
        features: i.features,
        iterations: i.iterations,
        log_likelihood: i.log_likelihood,
        lambdas: i.lambdas,
    }))
}

async fn save_handler(
    State(state): State<Arc<AppState>>,
    body: Result<Json<SaveRequest>, JsonRejection>,
) -> Result<Json<SaveResponse>, ApiError> {
    let Some(path) = &state.save_path else {
        return Err(ApiError::new(StatusCode::FORBIDDEN, "saving is disabled; start the server with --allow-write"));
    };
    let Json(req) = body?;
    let mut out = Vec::with_capacity(req.trees.len());
    for (i, text) in req.trees.iter().enumerate() {
        let tree = parse_sentence(text).map_err(|e| ApiError::bad_request(format!("tree {i}: {e}")))?;
        if let Some(v) = validate_tree(&tree).first() {
            return Err(ApiError::bad_request(format!("tree {i}: {v}")));
        }
        let tags = encode_tree(&tree).map_err(|e| ApiError::bad_request(format!("tree {i}: {e}")))?;
        let words = tree.leaves.iter().map(|l| l.word.clone()).collect();
        out.push(TaggedSentence::new(words, tags));
    }
    let _guard = state.write_lock.lock().unwrap_or_else(|p| p.into_inner());
    append_columnar(path, &out).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(Json(SaveResponse { saved: out.len() }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/parse-span", post(parse_span_handler))
        .route("/v1/chunk", post(chunk_handler))
        .route("/v1/model", get(model_handler))
        .route("/v1/save", post(save_handler))
        .with_state(Arc::new(state))
}

/// Serves until the process is stopped.
pub async fn serve(listener: TcpListener, state: AppState) -> io::Result<()> {
    axum::serve(listener, router(state)).await
}
