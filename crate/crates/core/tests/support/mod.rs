#![allow(dead_code)]

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use aad_core::provider::wire::{DescriptorBody, ErrorBody, LogitsResponse, OwnedLogitRequest};
use aad_core::{
    AadError, AudioClip, LogitProvider, LogitRequest, LogitVector, ProviderDescriptor, Result,
    TokenId, ToyProvider, ToyWorld,
};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};

pub fn scene(world: &ToyWorld, present: &[&str]) -> AudioClip {
    let set: BTreeSet<&str> = present.iter().copied().collect();
    world.render_scene(&set).unwrap()
}

/// Records every request it forwards.
pub struct Recording<P> {
    pub inner: P,
    pub log: Mutex<Vec<OwnedLogitRequest>>,
}

impl<P> Recording<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<OwnedLogitRequest> {
        self.log.lock().unwrap().clone()
    }
}

impl<P: LogitProvider> LogitProvider for Recording<P> {
    fn descriptor(&self) -> &ProviderDescriptor {
        self.inner.descriptor()
    }

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector> {
        self.log.lock().unwrap().push(request.into());
        self.inner.next_token_logits(request)
    }
}

/// Fails every request whose prompt mentions `poison`.
pub struct Flaky<P> {
    pub inner: P,
    pub poison: String,
}

impl<P: LogitProvider> LogitProvider for Flaky<P> {
    fn descriptor(&self) -> &ProviderDescriptor {
        self.inner.descriptor()
    }

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector> {
        if request.prompt_text.contains(&self.poison) {
            return Err(AadError::Transport("connection reset".into()));
        }
        self.inner.next_token_logits(request)
    }
}

/// Serves fixed logits regardless of the request, for probing the decoder
/// with arbitrary with/without-audio pairs.
pub struct Fixed {
    pub descriptor: ProviderDescriptor,
    pub with_audio: Vec<Vec<f64>>,
    pub without_audio: Vec<Vec<f64>>,
}

impl LogitProvider for Fixed {
    fn descriptor(&self) -> &ProviderDescriptor {
        &self.descriptor
    }

    fn next_token_logits(&self, request: &LogitRequest<'_>) -> Result<LogitVector> {
        let table = if request.blank {
            &self.without_audio
        } else {
            &self.with_audio
        };
        let step = request.generated_tokens.len().min(table.len() - 1);
        LogitVector::new(table[step].clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServerMode {
    Conforming,
    /// Returns one logit fewer than the descriptor declares.
    ShortLogits,
    /// Answers the first `n` logit requests with 503.
    Busy(usize),
    /// Always answers with the given status.
    Status(u16),
    /// Sleeps before answering.
    Slow(Duration),
}

pub struct ToyServer {
    pub addr: SocketAddr,
    pub hits: Arc<AtomicUsize>,
}

impl ToyServer {
    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

struct ServerState {
    provider: ToyProvider,
    mode: ServerMode,
    hits: Arc<AtomicUsize>,
}

/// Starts an HTTP server on a loopback port that answers the logit protocol
/// with a toy provider. The server lives until the test process exits.
pub fn spawn_toy_server(world: ToyWorld, mode: ServerMode) -> ToyServer {
    let hits = Arc::new(AtomicUsize::new(0));
    let state = Arc::new(ServerState {
        provider: ToyProvider::new(world),
        mode,
        hits: hits.clone(),
    });
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let app = Router::new()
                .route("/v1/descriptor", get(descriptor))
                .route("/v1/logits", post(logits))
                .with_state(state);
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    let addr = rx.recv().unwrap();
    ToyServer { addr, hits }
}

async fn descriptor(State(state): State<Arc<ServerState>>) -> Json<DescriptorBody> {
    let d = state.provider.descriptor();
    Json(DescriptorBody {
        vocabulary_size: d.vocabulary_size,
        tokens: d.tokens.clone(),
        eos_token_id: None,
    })
}

async fn logits(
    State(state): State<Arc<ServerState>>,
    Json(request): Json<OwnedLogitRequest>,
) -> Response {
    let hit = state.hits.fetch_add(1, Ordering::SeqCst);
    match state.mode {
        ServerMode::Busy(n) if hit < n => return error(503, "queue full"),
        ServerMode::Status(code) => return error(code, "model exploded"),
        ServerMode::Slow(d) => tokio::time::sleep(d).await,
        _ => {}
    }
    match state.provider.next_token_logits(&request.as_request()) {
        Ok(l) => {
            let mut logits = l.into_inner();
            if state.mode == ServerMode::ShortLogits {
                logits.pop();
            }
            Json(LogitsResponse {
                vocabulary_size: state.provider.descriptor().vocabulary_size,
                logits,
            })
            .into_response()
        }
        Err(e) => error(400, &e.to_string()),
    }
}

fn error(code: u16, message: &str) -> Response {
    (
        StatusCode::from_u16(code).unwrap(),
        Json(ErrorBody {
            error: message.to_owned(),
        }),
    )
        .into_response()
}

pub fn token_strings(descriptor: &ProviderDescriptor, tokens: &[TokenId]) -> Vec<String> {
    tokens
        .iter()
        .map(|&t| descriptor.token_text(t).unwrap_or("?").to_owned())
        .collect()
}
