use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode, Uri};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use foveate::{plan_frame, DensityInput, FoveationParams, RasterImage};
use futures_util::{SinkExt, StreamExt};
use serde::Deserialize;
use tokio::net::TcpListener;
use tokio::sync::{mpsc, watch};

use crate::protocol::{ControlMessage, ErrorReply, RenderMethod};
use crate::render::{render_frame, render_job, Job, Session};

const FALLBACK_PAGE: &str = include_str!("fallback.html");

/// What the service renders and with which defaults.
#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub image: RasterImage,
    pub params: FoveationParams,
    pub method: RenderMethod,
    /// Directory with the viewer build; `GET /` serves its `index.html`.
    pub assets: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(image: RasterImage) -> Self {
        Self {
            image,
            params: FoveationParams::default(),
            method: RenderMethod::Blockwise,
            assets: None,
        }
    }
}

type AppState = Arc<ServiceConfig>;

pub fn router(config: ServiceConfig) -> Router {
    Router::new()
        .route("/", get(index))
        .route("/frame", get(frame))
        .route("/grid", get(grid))
        .route("/stream", get(stream))
        .fallback(get(asset))
        .with_state(Arc::new(config))
}

/// Binds `addr`; fails if the port is taken.
pub async fn bind(addr: SocketAddr) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        log::info!(
            "serving {}x{} image on http://{addr}",
            config.image.width(),
            config.image.height()
        );
    }
    axum::serve(listener, router(config)).await
}

async fn index(State(state): State<AppState>) -> Response {
    if let Some(dir) = &state.assets {
        let path = dir.join("index.html");
        match tokio::fs::read(&path).await {
            Ok(body) => return with_type(body, "text/html; charset=utf-8"),
            Err(e) => log::warn!("{}: {e}; using built-in page", path.display()),
        }
    }
    Html(FALLBACK_PAGE).into_response()
}

async fn asset(State(state): State<AppState>, uri: Uri) -> Response {
    let Some(dir) = &state.assets else {
        return StatusCode::NOT_FOUND.into_response();
    };
    let Some(rel) = safe_relative(uri.path()) else {
        return StatusCode::NOT_FOUND.into_response();
    };
    match tokio::fs::read(dir.join(&rel)).await {
        Ok(body) => with_type(body, content_type(&rel)),
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}

/// Request path as a relative path without `..` or root components.
fn safe_relative(path: &str) -> Option<PathBuf> {
    let rel = Path::new(path.trim_start_matches('/'));
    let ok = rel.components().all(|c| matches!(c, Component::Normal(_)));
    (ok && !rel.as_os_str().is_empty()).then(|| rel.to_path_buf())
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json" | "map") => "application/json",
        Some("png") => "image/png",
        Some("svg") => "image/svg+xml",
        Some("wasm") => "application/wasm",
        _ => "application/octet-stream",
    }
}

fn with_type(body: Vec<u8>, mime: &'static str) -> Response {
    ([(header::CONTENT_TYPE, mime)], body).into_response()
}

/// Query string of `/frame` and `/grid`; the fixation defaults to the
/// configured one (image center when unset).
#[derive(Debug, Deserialize)]
struct FrameQuery {
    x: Option<i64>,
    y: Option<i64>,
    e_corner: Option<f64>,
    strength: Option<f64>,
    fragment: Option<usize>,
    method: Option<String>,
}

fn resolve_query(state: &ServiceConfig, q: FrameQuery) -> Result<Job, String> {
    let (cx, cy) = state
        .params
        .resolve_fixation(state.image.dims())
        .map_err(|e| e.to_string())?;
    let msg = ControlMessage {
        x: q.x.unwrap_or(cx as i64),
        y: q.y.unwrap_or(cy as i64),
        e_corner: q.e_corner,
        strength: q.strength,
        fragment: q.fragment,
        method: q.method,
    };
    Session::new(state.params.clone(), state.method).apply(&msg, state.image.dims())
}

fn bad_request(message: String) -> Response {
    (StatusCode::BAD_REQUEST, Json(ErrorReply { error: message })).into_response()
}

async fn frame(State(state): State<AppState>, Query(q): Query<FrameQuery>) -> Response {
    let job = match resolve_query(&state, q) {
        Ok(job) => job,
        Err(e) => return bad_request(e),
    };
    let rendered = tokio::task::spawn_blocking(move || {
        let (stats, image) = render_job(&state.image, &job)?;
        Ok::<_, foveate::Error>((stats, image.encode_png()?))
    })
    .await;
    match rendered {
        Ok(Ok((stats, png))) => {
            let mut resp = with_type(png, "image/png");
            let meta = serde_json::to_string(&stats).expect("stats serialize");
            if let Ok(v) = HeaderValue::from_str(&meta) {
                resp.headers_mut().insert("x-frame-stats", v);
            }
            resp
        }
        Ok(Err(e)) => bad_request(e.to_string()),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn grid(State(state): State<AppState>, Query(q): Query<FrameQuery>) -> Response {
    let job = match resolve_query(&state, q) {
        Ok(job) => job,
        Err(e) => return bad_request(e),
    };
    match plan_frame(state.image.dims(), &job.params, DensityInput::None) {
        Ok(plan) => Json(plan.grid.dump(&plan.bank)).into_response(),
        Err(e) => bad_request(e.to_string()),
    }
}

async fn stream(State(state): State<AppState>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| session(socket, state))
}

fn error_text(message: String) -> Message {
    let body = serde_json::to_string(&ErrorReply { error: message }).expect("error serialize");
    Message::Text(body.into())
}

/// One connection: a reader that parses and coalesces control messages and
/// a writer that renders the newest job whenever the previous frame is out.
async fn session(socket: WebSocket, state: AppState) {
    let (mut sink, mut source) = socket.split();
    let (job_tx, mut job_rx) = watch::channel::<Option<Job>>(None);
    let (err_tx, mut err_rx) = mpsc::unbounded_channel::<String>();
    let dims = state.image.dims();
    let image = Arc::clone(&state);

    let reader = async move {
        let mut session = Session::new(state.params.clone(), state.method);
        while let Some(Ok(msg)) = source.next().await {
            let reply = match msg {
                Message::Text(text) => ControlMessage::parse(&text)
                    .and_then(|m| session.apply(&m, dims))
                    .map(|job| {
                        job_tx.send_replace(Some(job));
                    }),
                Message::Binary(_) => Err("binary messages are not accepted".to_string()),
                Message::Close(_) => break,
                Message::Ping(_) | Message::Pong(_) => Ok(()),
            };
            if let Err(e) = reply {
                log::debug!("rejected message: {e}");
                if err_tx.send(e).is_err() {
                    break;
                }
            }
        }
    };

    let writer = async move {
        loop {
            let out = tokio::select! {
                biased;
                Some(e) = err_rx.recv() => error_text(e),
                changed = job_rx.changed() => {
                    if changed.is_err() {
                        break;
                    }
                    let Some(job) = job_rx.borrow_and_update().clone() else {
                        continue;
                    };
                    let img = Arc::clone(&image);
                    match tokio::task::spawn_blocking(move || render_frame(&img.image, &job)).await {
                        Ok(Ok(frame)) => Message::Binary(frame.into()),
                        Ok(Err(e)) => error_text(e.to_string()),
                        Err(e) => error_text(format!("render task failed: {e}")),
                    }
                }
                else => break,
            };
            if sink.send(out).await.is_err() {
                break;
            }
        }
    };

    tokio::join!(reader, writer);
    log::debug!("stream closed");
}
