//! Session-based HTTP API for interactive, repeated object removal.
//!
//! A session holds a base image. The client sets a mask (PNG or brush
//! strokes), starts a fill job, polls progress and previews, then commits the
//! result as the new base or undoes back to an earlier one.
//!
//! | method | path                       | success |
//! |--------|----------------------------|---------|
//! | POST   | `/sessions`                | 201     |
//! | GET    | `/sessions/{id}/image`     | 200 PNG |
//! | POST   | `/sessions/{id}/mask`      | 200     |
//! | POST   | `/sessions/{id}/inpaint`   | 202     |
//! | GET    | `/sessions/{id}/progress`  | 200     |
//! | GET    | `/sessions/{id}/preview`   | 200 PNG |
//! | GET    | `/sessions/{id}/result`    | 200 PNG |
//! | POST   | `/sessions/{id}/commit`    | 200     |
//! | POST   | `/sessions/{id}/undo`      | 200     |
//!
//! Errors are `{"code": "...", "message": "..."}` with a 4xx status.

mod strokes;

use std::collections::{HashMap, VecDeque};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Semaphore;

use crate::engine::{init_state, iteration_estimate, step, InpaintState};
use crate::error::Error;
use crate::io::{decode_image, decode_mask, encode_png};
use crate::raster::{BBox, PatchSize, RasterImage, RegionMask};
use crate::search::{KernelKind, SearchConfig, SearchFactor};

pub use strokes::{rasterize_strokes, Stroke};

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    /// Largest accepted image, in pixels.
    pub max_image_px: usize,
    pub max_body_bytes: usize,
    /// Idle sessions older than this are dropped.
    pub session_ttl: Duration,
    /// Committed bases kept for undo.
    pub history_cap: usize,
    /// Take a preview snapshot every this many iterations.
    pub preview_every: usize,
    /// Fill jobs allowed to run at once across all sessions.
    pub max_concurrent_jobs: usize,
    pub threads_per_job: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self {
            max_image_px: 16 * 1024 * 1024,
            max_body_bytes: 64 * 1024 * 1024,
            session_ttl: Duration::from_secs(30 * 60),
            history_cap: 16,
            preview_every: 10,
            max_concurrent_jobs: cores.max(1),
            threads_per_job: cores.max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobParams {
    pub alpha: SearchFactor,
    pub patch_size: usize,
    pub kernel: KernelKind,
}

impl Default for JobParams {
    fn default() -> Self {
        Self {
            alpha: SearchFactor::Factor(0.2),
            patch_size: 9,
            kernel: KernelKind::Tiled,
        }
    }
}

#[derive(Clone, Debug)]
struct JobProgress {
    id: u64,
    params: JobParams,
    initial_object: usize,
    filled: usize,
    iteration: usize,
    estimate_total: usize,
    preview: Option<RasterImage>,
}

#[derive(Clone, Debug)]
enum Job {
    Idle,
    Running(JobProgress),
    Done(JobProgress, RasterImage),
    Failed(JobProgress, String),
}

struct Session {
    base: RasterImage,
    mask: Option<RegionMask>,
    job: Job,
    history: VecDeque<RasterImage>,
    last_access: Instant,
    next_job_id: u64,
}

type SessionHandle = Arc<Mutex<Session>>;

struct Inner {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, SessionHandle>>,
    jobs: Arc<Semaphore>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        let jobs = Arc::new(Semaphore::new(config.max_concurrent_jobs.max(1)));
        Self(Arc::new(Inner {
            config,
            sessions: Mutex::new(HashMap::new()),
            jobs,
        }))
    }

    pub fn session_count(&self) -> usize {
        lock(&self.0.sessions).len()
    }

    /// Drops sessions idle for longer than the TTL. Sessions with a running
    /// job are kept.
    pub fn evict_expired(&self) -> usize {
        let ttl = self.0.config.session_ttl;
        let mut sessions = lock(&self.0.sessions);
        let before = sessions.len();
        sessions.retain(|_, s| {
            let s = lock(s);
            matches!(s.job, Job::Running(_)) || s.last_access.elapsed() < ttl
        });
        before - sessions.len()
    }

    fn session(&self, id: &str) -> Result<SessionHandle, ApiError> {
        let handle = lock(&self.0.sessions)
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no session '{id}'")))?;
        lock(&handle).last_access = Instant::now();
        Ok(handle)
    }
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "conflict", message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_input", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "code": self.code, "message": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    let limit = state.0.config.max_body_bytes;
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/image", get(get_image))
        .route("/sessions/{id}/mask", post(set_mask))
        .route("/sessions/{id}/inpaint", post(start_inpaint))
        .route("/sessions/{id}/progress", get(get_progress))
        .route("/sessions/{id}/preview", get(get_preview))
        .route("/sessions/{id}/result", get(get_result))
        .route("/sessions/{id}/commit", post(commit))
        .route("/sessions/{id}/undo", post(undo))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

/// Binds `addr` and serves until the process exits. Expired sessions are
/// swept in the background.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    let sweep_every = (state.0.config.session_ttl / 2).max(Duration::from_secs(1));
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(sweep_every);
        loop {
            tick.tick().await;
            let n = sweeper.evict_expired();
            if n > 0 {
                log::info!("evicted {n} idle sessions");
            }
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

fn png_response(img: &RasterImage) -> ApiResult<Response> {
    let bytes = encode_png(img)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "encode_failed", e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], bytes).into_response())
}

fn bbox_json(b: Option<BBox>) -> serde_json::Value {
    b.map_or(serde_json::Value::Null, |b| {
        json!({ "min_x": b.min_x, "min_y": b.min_y, "max_x": b.max_x, "max_y": b.max_y })
    })
}

fn base_summary(s: &Session) -> serde_json::Value {
    json!({
        "width": s.base.width(),
        "height": s.base.height(),
        "history_len": s.history.len(),
    })
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> ApiResult<Response> {
    app.evict_expired();
    let (w, h) = crate::io::probe_dimensions(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "unsupported_format", e.to_string()))?;
    if w * h > app.0.config.max_image_px {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "too_large",
            format!("{w}x{h} exceeds the {} pixel limit", app.0.config.max_image_px),
        ));
    }
    let base = decode_image(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "unsupported_format", e.to_string()))?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session {
        base,
        mask: None,
        job: Job::Idle,
        history: VecDeque::new(),
        last_access: Instant::now(),
        next_job_id: 1,
    };
    let body = json!({ "id": id, "width": w, "height": h });
    lock(&app.0.sessions).insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

/// The current base image: the upload, or the last committed result.
async fn get_image(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = app.session(&id)?;
    let base = lock(&handle).base.clone();
    png_response(&base)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrokePayload {
    strokes: Vec<Stroke>,
}

async fn set_mask(
    State(app): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let handle = app.session(&id)?;
    let (w, h) = {
        let s = lock(&handle);
        if matches!(s.job, Job::Running(_)) {
            return Err(ApiError::conflict("a job is running"));
        }
        s.base.dims()
    };
    let is_json = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains("json"));
    let mask = if is_json {
        let payload: StrokePayload = serde_json::from_slice(&body)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))?;
        rasterize_strokes(w, h, &payload.strokes)
    } else {
        decode_mask(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "unsupported_format", e.to_string()))?
    };
    if mask.dims() != (w, h) {
        return Err(ApiError::unprocessable(format!(
            "mask is {}x{}, image is {w}x{h}",
            mask.width(),
            mask.height()
        )));
    }
    match mask.object_count() {
        0 => return Err(ApiError::unprocessable("mask marks no object pixels")),
        n if n == w * h => return Err(ApiError::unprocessable("mask covers the whole image")),
        _ => {}
    }
    let response = json!({ "object_pixels": mask.object_count(), "bbox": bbox_json(mask.object_bbox()) });
    let mut s = lock(&handle);
    if matches!(s.job, Job::Running(_)) {
        return Err(ApiError::conflict("a job is running"));
    }
    s.mask = Some(mask);
    s.job = Job::Idle;
    Ok(Json(response))
}

async fn start_inpaint(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let handle = app.session(&id)?;
    let params: JobParams = if body.iter().all(u8::is_ascii_whitespace) {
        JobParams::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::unprocessable(e.to_string()))?
    };
    let patch_size = PatchSize::new(params.patch_size).map_err(|e| ApiError::unprocessable(e.to_string()))?;
    let config = SearchConfig {
        alpha: params.alpha,
        patch_size,
        kernel: params.kernel,
        threads: app.0.config.threads_per_job,
        ..SearchConfig::default()
    };
    config.validate().map_err(|e| ApiError::unprocessable(e.to_string()))?;

    let (engine, progress) = {
        let mut s = lock(&handle);
        match s.job {
            Job::Idle => {}
            Job::Running(_) => return Err(ApiError::conflict("a job is already running")),
            Job::Done(..) | Job::Failed(..) => {
                return Err(ApiError::conflict("commit the result or set a new mask first"))
            }
        }
        let mask = s.mask.clone().ok_or_else(|| ApiError::unprocessable("no mask set"))?;
        let bbox = mask.object_bbox().ok_or_else(|| ApiError::unprocessable("mask is empty"))?;
        let engine = init_state(s.base.clone(), mask, config).map_err(|e| match e {
            Error::InvalidConfig(_) | Error::DimensionMismatch { .. } | Error::EmptyObjectRegion | Error::ObjectCoversImage => {
                ApiError::unprocessable(e.to_string())
            }
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "engine_error", other.to_string()),
        })?;
        let progress = JobProgress {
            id: s.next_job_id,
            params: params.clone(),
            initial_object: engine.initial_object_pixels(),
            filled: 0,
            iteration: 0,
            estimate_total: iteration_estimate(bbox.width(), bbox.height(), patch_size.get()),
            preview: Some(s.base.clone()),
        };
        s.next_job_id += 1;
        s.job = Job::Running(progress.clone());
        (engine, progress)
    };

    let permits = app.0.jobs.clone();
    let every = app.0.config.preview_every.max(1);
    let job_handle = handle.clone();
    let job_id = progress.id;
    tokio::spawn(async move {
        let _permit = permits.acquire_owned().await;
        let _ = tokio::task::spawn_blocking(move || run_job(job_handle, engine, job_id, every)).await;
    });

    Ok((
        StatusCode::ACCEPTED,
        Json(json!({ "job": progress.id, "params": progress.params })),
    )
        .into_response())
}

fn run_job(handle: SessionHandle, mut engine: InpaintState, job_id: u64, preview_every: usize) {
    while !engine.is_done() {
        let outcome = step(&mut engine);
        let mut s = lock(&handle);
        let Job::Running(progress) = &mut s.job else {
            return;
        };
        if progress.id != job_id {
            return;
        }
        match outcome {
            Ok(report) => {
                progress.iteration = report.iteration;
                progress.filled = progress.initial_object - report.remaining_object_pixels;
                if report.iteration % preview_every == 0 {
                    progress.preview = Some(engine.image().clone());
                }
            }
            Err(e) => {
                let progress = progress.clone();
                s.job = Job::Failed(progress, e.to_string());
                return;
            }
        }
    }
    let mut s = lock(&handle);
    if let Job::Running(progress) = &s.job {
        if progress.id == job_id {
            let mut progress = progress.clone();
            progress.filled = progress.initial_object;
            progress.iteration = engine.iteration();
            progress.preview = None;
            s.job = Job::Done(progress, engine.into_summary().image);
        }
    }
}

async fn get_progress(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<serde_json::Value>> {
    let handle = app.session(&id)?;
    let s = lock(&handle);
    let fraction = |p: &JobProgress| p.filled as f64 / p.initial_object.max(1) as f64;
    let body = match &s.job {
        Job::Idle => json!({
            "state": "idle", "job": null, "fraction_filled": 0.0, "iteration": 0,
            "estimate_total_iterations": null, "params": null, "error": null,
        }),
        Job::Running(p) => json!({
            "state": "running", "job": p.id, "fraction_filled": fraction(p), "iteration": p.iteration,
            "estimate_total_iterations": p.estimate_total, "params": p.params, "error": null,
        }),
        Job::Done(p, _) => json!({
            "state": "done", "job": p.id, "fraction_filled": 1.0, "iteration": p.iteration,
            "estimate_total_iterations": p.estimate_total, "params": p.params, "error": null,
            "result_available": true,
        }),
        Job::Failed(p, reason) => json!({
            "state": "failed", "job": p.id, "fraction_filled": fraction(p), "iteration": p.iteration,
            "estimate_total_iterations": p.estimate_total, "params": p.params, "error": reason,
        }),
    };
    Ok(Json(body))
}

async fn get_preview(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = app.session(&id)?;
    let snapshot = {
        let s = lock(&handle);
        match &s.job {
            Job::Running(JobProgress { preview: Some(img), .. }) => img.clone(),
            Job::Done(_, result) => result.clone(),
            _ => return Err(ApiError::conflict("no preview available")),
        }
    };
    png_response(&snapshot)
}

async fn get_result(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = app.session(&id)?;
    let result = match &lock(&handle).job {
        Job::Done(_, result) => result.clone(),
        _ => return Err(ApiError::conflict("no finished result")),
    };
    png_response(&result)
}

async fn commit(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<serde_json::Value>> {
    let handle = app.session(&id)?;
    let cap = app.0.config.history_cap;
    let mut s = lock(&handle);
    let Job::Done(_, result) = std::mem::replace(&mut s.job, Job::Idle) else {
        return Err(ApiError::conflict("no finished result to commit"));
    };
    let previous = std::mem::replace(&mut s.base, result);
    s.history.push_back(previous);
    while s.history.len() > cap {
        s.history.pop_front();
    }
    s.mask = None;
    Ok(Json(base_summary(&s)))
}

async fn undo(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<serde_json::Value>> {
    let handle = app.session(&id)?;
    let mut s = lock(&handle);
    if matches!(s.job, Job::Running(_)) {
        return Err(ApiError::conflict("a job is running"));
    }
    let previous = s.history.pop_back().ok_or_else(|| ApiError::conflict("nothing to undo"))?;
    s.base = previous;
    s.mask = None;
    s.job = Job::Idle;
    Ok(Json(base_summary(&s)))
}
