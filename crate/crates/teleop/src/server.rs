use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;
use tokio::time::{sleep_until, Instant};
use wedgeguide::world::World;
use wedgeguide::{GuidancePolicy, QTable};

use crate::protocol::CLOSE_BINARY_FRAME;
use crate::session::{Reply, Session, SessionConfig};

/// Everything a server needs to open sessions.
#[derive(Clone)]
pub struct ServeConfig {
    pub world: Arc<World>,
    /// Greedy policy for RLGS and GHAL360 sessions.
    pub policy: Option<Arc<GuidancePolicy>>,
    /// Q-table copied into each session when `session.online` is set.
    pub q: Option<QTable>,
    pub session: SessionConfig,
    /// Connection `n` runs with seed `mix(seed, n)`.
    pub seed: u64,
    /// Directory receiving `session-<n>.jsonl` traces when a connection closes.
    pub record_dir: Option<PathBuf>,
}

struct AppState {
    cfg: ServeConfig,
    next_id: AtomicU64,
}

/// Router with the `/session` WebSocket endpoint.
pub fn router(cfg: ServeConfig) -> Router {
    let state = Arc::new(AppState { cfg, next_id: AtomicU64::new(0) });
    Router::new().route("/session", get(upgrade)).with_state(state)
}

/// Serves sessions on an already bound listener until the task is dropped.
pub async fn serve_on(listener: TcpListener, cfg: ServeConfig) -> std::io::Result<()> {
    axum::serve(listener, router(cfg)).await
}

pub async fn serve(addr: SocketAddr, cfg: ServeConfig) -> std::io::Result<()> {
    serve_on(TcpListener::bind(addr).await?, cfg).await
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<Arc<AppState>>) -> Response {
    ws.on_upgrade(move |socket| run_connection(socket, state))
}

async fn send(socket: &mut WebSocket, text: String) -> bool {
    socket.send(Message::Text(text.into())).await.is_ok()
}

async fn close(socket: &mut WebSocket, code: u16, reason: String) {
    let _ = socket.send(Message::Close(Some(CloseFrame { code, reason: reason.into() }))).await;
}

async fn run_connection(mut socket: WebSocket, state: Arc<AppState>) {
    let id = state.next_id.fetch_add(1, Ordering::SeqCst);
    let cfg = &state.cfg;
    let seed = wedgeguide::rng::mix(cfg.seed, id);
    let mut session =
        match Session::new(id, cfg.world.clone(), cfg.policy.clone(), cfg.q.clone(), cfg.session.clone(), seed) {
            Ok(s) => s,
            Err(e) => {
                close(&mut socket, 1011, e.to_string()).await;
                return;
            }
        };
    if !send(&mut socket, session.hello().to_json()).await || !send(&mut socket, session.snapshot().to_json()).await {
        return;
    }

    let cadence = Duration::from_millis(cfg.session.cadence_ms.max(1));
    let mut deadline = Instant::now() + cadence;
    loop {
        tokio::select! {
            frame = socket.recv() => {
                match frame {
                    Some(Ok(Message::Text(text))) => match session.handle_text(text.as_str()) {
                        Reply::Send(m) => {
                            if !send(&mut socket, m.to_json()).await {
                                break;
                            }
                        }
                        Reply::Close { code, reason } => {
                            close(&mut socket, code, reason).await;
                            break;
                        }
                    },
                    Some(Ok(Message::Binary(_))) => {
                        close(&mut socket, CLOSE_BINARY_FRAME, "binary frames not supported".into()).await;
                        break;
                    }
                    Some(Ok(Message::Ping(_) | Message::Pong(_))) => continue,
                    Some(Ok(Message::Close(_))) | Some(Err(_)) | None => break,
                }
                deadline = Instant::now() + cadence;
            }
            _ = sleep_until(deadline) => {
                if let Some(m) = session.cadence() {
                    if !send(&mut socket, m.to_json()).await {
                        break;
                    }
                }
                deadline = Instant::now() + cadence;
            }
        }
    }

    if let Some(dir) = &cfg.record_dir {
        if let Ok(text) = session.record().to_jsonl() {
            let _ = std::fs::create_dir_all(dir);
            let _ = std::fs::write(dir.join(format!("session-{id}.jsonl")), text);
        }
    }
}
