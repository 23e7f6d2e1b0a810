//! Local HTTP service backing the annotation tool.
//!
//! The service keeps no state between requests: every handler reads the
//! dataset directory afresh, and annotation saves replace the sketch's
//! `.parts` file atomically. Concurrent saves of the same sketch resolve as
//! last writer wins.

use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dataset::{
    annotation_path, category_dirs, format_annotations, list_sketch_ids, load_annotations, load_parts, load_sketch,
    reference_image_path, sketch_path, write_atomic,
};
use crate::error::Error;
use crate::model::{Canvas, PartAnnotation, Stroke, DEFAULT_CANVAS};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub dataset_root: PathBuf,
    pub default_canvas: Canvas,
    /// Directory of built UI assets served under `/` and `/ui/`.
    pub assets: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(dataset_root: impl Into<PathBuf>) -> Self {
        Self { dataset_root: dataset_root.into(), default_canvas: DEFAULT_CANVAS, assets: None }
    }
}

type Shared = Arc<ServiceConfig>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    detail: String,
    index: Option<usize>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        Self { status, code, detail: detail.into(), index: None }
    }

    fn not_found(what: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not found", what)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "dataset error", e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code, "detail": self.detail });
        if let Some(i) = self.index {
            body["index"] = json!(i);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

/// Ids and category names become path components, so only a conservative
/// character set is accepted.
fn safe_name(name: &str) -> ApiResult<&str> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | ' '));
    if ok {
        Ok(name)
    } else {
        Err(ApiError::new(StatusCode::BAD_REQUEST, "bad name", format!("\"{name}\" is not a valid identifier")))
    }
}

fn category_dir(cfg: &ServiceConfig, category: &str) -> ApiResult<PathBuf> {
    let dir = cfg.dataset_root.join(safe_name(category)?);
    if dir.join(crate::dataset::PARTS_FILE).is_file() {
        Ok(dir)
    } else {
        Err(ApiError::not_found(format!("category \"{category}\"")))
    }
}

fn locate_sketch(cfg: &ServiceConfig, sketch_id: &str) -> ApiResult<PathBuf> {
    safe_name(sketch_id)?;
    category_dirs(&cfg.dataset_root)?
        .into_iter()
        .find(|dir| sketch_path(dir, sketch_id).is_file())
        .ok_or_else(|| ApiError::not_found(format!("sketch \"{sketch_id}\"")))
}

fn dir_name(dir: &Path) -> String {
    dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Serialize)]
struct CategorySummary {
    name: String,
    parts: Vec<String>,
    sketches: usize,
    annotated: usize,
    has_reference_image: bool,
}

async fn list_categories(State(cfg): State<Shared>) -> ApiResult<Json<serde_json::Value>> {
    let mut out = Vec::new();
    for dir in category_dirs(&cfg.dataset_root)? {
        let parts = load_parts(&dir)?;
        let ids = list_sketch_ids(&dir)?;
        let annotated = ids.iter().filter(|id| annotation_path(&dir, id).is_file()).count();
        out.push(CategorySummary {
            name: dir_name(&dir),
            parts: parts.parts,
            sketches: ids.len(),
            annotated,
            has_reference_image: reference_image_path(&dir).is_some(),
        });
    }
    Ok(Json(json!({ "categories": out })))
}

#[derive(Deserialize)]
struct SketchFilter {
    #[serde(default)]
    pending: bool,
}

async fn list_sketches(
    State(cfg): State<Shared>,
    UrlPath(category): UrlPath<String>,
    Query(filter): Query<SketchFilter>,
) -> ApiResult<Json<serde_json::Value>> {
    let dir = category_dir(&cfg, &category)?;
    let sketches: Vec<_> = list_sketch_ids(&dir)?
        .into_iter()
        .map(|id| {
            let annotated = annotation_path(&dir, &id).is_file();
            (id, annotated)
        })
        .filter(|(_, annotated)| !(filter.pending && *annotated))
        .map(|(id, annotated)| json!({ "id": id, "annotated": annotated }))
        .collect();
    Ok(Json(json!({ "category": category, "sketches": sketches })))
}

#[derive(Serialize)]
struct SketchView {
    sketch_id: String,
    category: String,
    canvas: Canvas,
    strokes: Vec<Stroke>,
    parts: Vec<String>,
    reference_image: Option<String>,
}

async fn get_sketch(State(cfg): State<Shared>, UrlPath(sketch_id): UrlPath<String>) -> ApiResult<Json<SketchView>> {
    let dir = locate_sketch(&cfg, &sketch_id)?;
    let parts = load_parts(&dir)?;
    let sketch = load_sketch(&dir, &sketch_id, cfg.default_canvas)?;
    let category = dir_name(&dir);
    let reference_image = reference_image_path(&dir).map(|_| format!("/categories/{category}/reference-image"));
    Ok(Json(SketchView {
        sketch_id,
        category,
        canvas: sketch.canvas,
        strokes: sketch.strokes,
        parts: parts.parts,
        reference_image,
    }))
}

#[derive(Serialize, Deserialize)]
pub struct AnnotationSet {
    #[serde(default, skip_deserializing)]
    pub sketch_id: String,
    pub annotations: Vec<PartAnnotation>,
}

async fn get_annotations(State(cfg): State<Shared>, UrlPath(sketch_id): UrlPath<String>) -> ApiResult<Json<AnnotationSet>> {
    let dir = locate_sketch(&cfg, &sketch_id)?;
    let parts = load_parts(&dir)?;
    let annotations = load_annotations(&dir, &sketch_id, &parts)?.unwrap_or_default();
    Ok(Json(AnnotationSet { sketch_id, annotations }))
}

async fn put_annotations(
    State(cfg): State<Shared>,
    UrlPath(sketch_id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let dir = locate_sketch(&cfg, &sketch_id)?;
    let set: AnnotationSet = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "malformed body", e.to_string()))?;
    let parts = load_parts(&dir)?;
    for (i, a) in set.annotations.iter().enumerate() {
        a.check(&parts).map_err(|fault| ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code: fault.code(),
            detail: format!("annotation {i} (\"{}\")", a.part_name),
            index: Some(i),
        })?;
    }
    write_atomic(&annotation_path(&dir, &sketch_id), format_annotations(&set.annotations).as_bytes())?;
    log::info!("saved {} annotation(s) for {sketch_id}", set.annotations.len());
    Ok(Json(json!({ "sketch_id": sketch_id, "saved": set.annotations.len() })))
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).unwrap_or_default() {
        "svg" => "image/svg+xml",
        "png" => "image/png",
        "jpg" | "jpeg" => "image/jpeg",
        "html" => "text/html; charset=utf-8",
        "js" | "mjs" => "text/javascript; charset=utf-8",
        "css" => "text/css; charset=utf-8",
        "json" => "application/json",
        _ => "application/octet-stream",
    }
}

fn file_response(path: &Path) -> ApiResult<Response> {
    let bytes = std::fs::read(path).map_err(|_| ApiError::not_found(path.display().to_string()))?;
    Ok(([(header::CONTENT_TYPE, content_type(path))], bytes).into_response())
}

async fn reference_image(State(cfg): State<Shared>, UrlPath(category): UrlPath<String>) -> ApiResult<Response> {
    let dir = category_dir(&cfg, &category)?;
    let path = reference_image_path(&dir).ok_or_else(|| ApiError::not_found(format!("reference image for \"{category}\"")))?;
    file_response(&path)
}

fn asset(cfg: &ServiceConfig, rel: &str) -> ApiResult<Response> {
    let root = cfg.assets.as_ref().ok_or_else(|| ApiError::not_found("no UI assets configured"))?;
    let rel = Path::new(rel);
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "bad name", rel.display().to_string()));
    }
    file_response(&root.join(rel))
}

async fn index(State(cfg): State<Shared>) -> ApiResult<Response> {
    asset(&cfg, "index.html")
}

async fn ui_asset(State(cfg): State<Shared>, UrlPath(rel): UrlPath<String>) -> ApiResult<Response> {
    asset(&cfg, &rel)
}

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/", get(index))
        .route("/ui/{*path}", get(ui_asset))
        .route("/categories", get(list_categories))
        .route("/categories/{category}/sketches", get(list_sketches))
        .route("/categories/{category}/reference-image", get(reference_image))
        .route("/sketches/{id}", get(get_sketch))
        .route("/sketches/{id}/annotations", get(get_annotations).put(put_annotations))
        .with_state(Arc::new(config))
}

/// Binds `addr` and serves until the process is interrupted.
pub async fn serve(config: ServiceConfig, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("annotation service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
