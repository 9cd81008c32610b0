//! A live `/session` server and a WebSocket client in one process.
//!
//! The server binds an ephemeral port. The client reads the hello frame and
//! follows the guidance indicator until the episode ends, letting the idle
//! cadence drive the base in between. It then shows the error reply to a
//! malformed frame and the close code for an unsupported protocol version.
//!
//! cargo run -p wedgeguide-teleop --example ws_client -- [map] [distance_m] [seed]

use std::sync::Arc;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio_tungstenite::tungstenite::Message;
use wedgeguide::harness::sample_start_poses;
use wedgeguide::policy::fgs_policy;
use wedgeguide::rng::{stream, Stream};
use wedgeguide::world::bundled_map;
use wedgeguide::GuidanceAction;
use wedgeguide_teleop::{
    serve_on, ClientCommand, ClientMessage, Phase, ServeConfig, ServerBody, ServerMessage, SessionConfig,
};

type Error = Box<dyn std::error::Error + Send + Sync>;

fn command_for(indicator: Option<GuidanceAction>) -> Option<ClientCommand> {
    match indicator? {
        GuidanceAction::Left => Some(ClientCommand::LookLeft),
        GuidanceAction::Right => Some(ClientCommand::LookRight),
        GuidanceAction::Confirm => Some(ClientCommand::Confirm),
    }
}

#[tokio::main]
async fn main() -> Result<(), Error> {
    let mut args = std::env::args().skip(1);
    let map = args.next().unwrap_or_else(|| "corridor".into());
    let distance: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10.0);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);

    let world = Arc::new(bundled_map(&map).ok_or(format!("unknown map {map}"))?);
    let start = sample_start_poses(&world, distance, 1, &mut stream(seed, Stream::StartPose))?[0];
    let cfg = ServeConfig {
        world,
        policy: Some(Arc::new(fgs_policy())),
        q: None,
        session: SessionConfig { start: Some(start), cadence_ms: 100, ..Default::default() },
        seed,
        record_dir: None,
    };
    let listener = TcpListener::bind("127.0.0.1:0").await?;
    let url = format!("ws://{}/session", listener.local_addr()?);
    tokio::spawn(serve_on(listener, cfg));
    println!("serving {url}");

    let (mut ws, _) = tokio_tungstenite::connect_async(&url).await?;
    let mut turns = 0;
    while let Some(frame) = ws.next().await {
        let Message::Text(text) = frame? else { continue };
        let msg: ServerMessage = serde_json::from_str(&text)?;
        let state = match msg.body {
            ServerBody::Hello(h) => {
                println!(
                    "hello: session {} system {} map {} ({}x{})",
                    h.session, h.system, h.map.name, h.map.rows, h.map.cols
                );
                continue;
            }
            ServerBody::State(s) => s,
            ServerBody::Error(e) => return Err(format!("{}: {}", e.code, e.reason).into()),
        };
        println!(
            "tick {:>3} {:?} focus {} indicator {:?} robot {:?} base {:?}",
            state.tick, state.phase, state.focus, state.indicator, state.robot.cell, state.command
        );
        if state.phase != Phase::Running || turns >= 200 {
            break;
        }
        // with no indicator the client stays idle and the cadence moves the base
        if let Some(cmd) = command_for(state.indicator) {
            println!("  > {}", ClientMessage::new(cmd.clone()).to_json());
            ws.send(Message::text(ClientMessage::new(cmd).to_json())).await?;
        }
        turns += 1;
    }

    ws.send(Message::text("{\"v\":1,\"type\":\"jump\"}")).await?;
    loop {
        let Some(frame) = tokio::time::timeout(Duration::from_secs(2), ws.next()).await? else { break };
        if let Message::Text(text) = frame? {
            if text.contains("\"error\"") {
                println!("malformed frame -> {text}");
                break;
            }
        }
    }

    ws.send(Message::text("{\"v\":2,\"type\":\"reset\"}")).await?;
    while let Some(frame) = ws.next().await {
        if let Message::Close(Some(close)) = frame? {
            println!("version 2 -> close {} {}", u16::from(close.code), close.reason);
            break;
        }
    }
    Ok(())
}
