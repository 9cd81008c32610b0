#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use wedgeguide::policy::fgs_policy;
use wedgeguide::world::{load_map_file, World};
use wedgeguide::GuidancePolicy;
use wedgeguide_teleop::{ServeConfig, Session, SessionConfig};

pub const GOLDEN_SEED: u64 = 7;

pub fn goldens() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("goldens")
}

pub fn lab() -> Arc<World> {
    Arc::new(load_map_file(&goldens().join("lab.map")).unwrap())
}

pub fn policy() -> Arc<GuidancePolicy> {
    Arc::new(fgs_policy())
}

/// GHAL360 with FGS guidance and no idle ticks during a scripted exchange.
pub fn golden_config() -> SessionConfig {
    SessionConfig { cadence_ms: 3_600_000, ..Default::default() }
}

pub fn serve_config() -> ServeConfig {
    ServeConfig {
        world: lab(),
        policy: Some(policy()),
        q: None,
        session: golden_config(),
        seed: GOLDEN_SEED,
        record_dir: None,
    }
}

/// The session the server opens for its first connection.
pub fn first_session() -> Session {
    let seed = wedgeguide::rng::mix(GOLDEN_SEED, 0);
    Session::new(0, lab(), Some(policy()), None, golden_config(), seed).unwrap()
}

pub enum Line {
    Client(String),
    Server(String),
}

pub fn parse_script(text: &str) -> Vec<Line> {
    text.lines()
        .filter_map(|l| {
            if let Some(rest) = l.strip_prefix("> ") {
                Some(Line::Client(rest.to_string()))
            } else {
                l.strip_prefix("< ").map(|rest| Line::Server(rest.to_string()))
            }
        })
        .collect()
}
