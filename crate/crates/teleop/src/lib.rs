//! Live operator sessions over WebSocket.
//!
//! [`Session`] is a sans-IO state machine: it consumes client text frames and
//! idle cadence ticks and produces state broadcasts. [`serve`] runs one
//! session per WebSocket connection on `/session`.

pub mod protocol;
mod server;
mod session;

pub use protocol::{ClientCommand, ClientMessage, Phase, ServerBody, ServerMessage, StateSnapshot, PROTOCOL_VERSION};
pub use server::{router, serve, serve_on, ServeConfig};
pub use session::{episode_seed, replay_broadcasts, shown_state, Reply, Session, SessionConfig, SessionError};
