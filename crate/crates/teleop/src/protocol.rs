//! Wire messages. Every message is one UTF-8 JSON text frame carrying `"v": 1`
//! and a `"type"` tag.

use serde::{Deserialize, Serialize};
use wedgeguide::intent::IntentEstimate;
use wedgeguide::world::{Cell, ControlCommand, HeadMotion, RobotPose, World};
use wedgeguide::{GuidanceAction, SystemKind, WedgeIndex, WedgeValue};

pub const PROTOCOL_VERSION: u32 = 1;

/// Close code for an unsupported or missing `"v"`.
pub const CLOSE_UNSUPPORTED_VERSION: u16 = 4001;
/// Close code for binary frames.
pub const CLOSE_BINARY_FRAME: u16 = 4002;

/// Operator input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientCommand {
    LookLeft,
    LookRight,
    MoveForward,
    MoveBackward,
    /// Declare the target found in the current view.
    Confirm,
    /// Display field of view; acknowledged but never part of session state.
    SetFov {
        degrees: f64,
    },
    /// Start a new episode from the start pose.
    Reset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientMessage {
    pub v: u32,
    #[serde(flatten)]
    pub command: ClientCommand,
}

impl ClientMessage {
    pub fn new(command: ClientCommand) -> Self {
        ClientMessage { v: PROTOCOL_VERSION, command }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("client messages serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Running,
    Found,
    Aborted,
}

/// One wedge of the schematic panorama.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanoramaWedge {
    pub wedge: WedgeIndex,
    /// `empty`, `clutter`, `target` or `target_clutter`.
    pub value: String,
    /// Names of the detected objects; `?` marks a detection with no object behind it.
    pub labels: Vec<String>,
}

/// Broadcast after every processed message and every idle cadence tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    /// Ticks processed in this episode.
    pub tick: u32,
    pub phase: Phase,
    /// Robot-frame wedge the viewport is centered on.
    pub focus: WedgeIndex,
    /// Head-orientation icon: the latest head turn.
    pub head: HeadMotion,
    /// Guidance indicator, or null when none is shown.
    pub indicator: Option<GuidanceAction>,
    pub panorama: Vec<PanoramaWedge>,
    pub robot: RobotPose,
    /// Base command issued by the intent controller on this tick.
    pub command: Option<ControlCommand>,
    pub intent: Option<IntentEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCell {
    pub name: String,
    pub row: i32,
    pub col: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapInfo {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub cell_size: f64,
    /// Grid rows, `#` for walls and `.` for free cells.
    pub grid: Vec<String>,
    pub target: NamedCell,
    pub objects: Vec<NamedCell>,
}

impl MapInfo {
    pub fn from_world(w: &World) -> Self {
        let named = |name: &str, c: Cell| NamedCell { name: name.into(), row: c.row, col: c.col };
        MapInfo {
            name: w.name.clone(),
            rows: w.rows(),
            cols: w.cols(),
            cell_size: w.cell_size,
            grid: w.grid_text(),
            target: named(&w.target().name, w.target().cell),
            objects: w.objects.iter().map(|o| named(&o.name, o.cell)).collect(),
        }
    }
}

/// Sent once when a connection opens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hello {
    pub session: u64,
    pub system: SystemKind,
    pub cadence_ms: u64,
    pub map: MapInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    /// `malformed`, `invalid_value` or `finished`.
    pub code: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerBody {
    Hello(Hello),
    State(StateSnapshot),
    Error(ErrorBody),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerMessage {
    pub v: u32,
    #[serde(flatten)]
    pub body: ServerBody,
}

impl ServerMessage {
    pub fn new(body: ServerBody) -> Self {
        ServerMessage { v: PROTOCOL_VERSION, body }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }

    pub fn state(&self) -> Option<&StateSnapshot> {
        match &self.body {
            ServerBody::State(s) => Some(s),
            _ => None,
        }
    }
}

pub(crate) fn wedge_value_name(v: WedgeValue) -> &'static str {
    match v {
        WedgeValue::Empty => "empty",
        WedgeValue::Clutter => "clutter",
        WedgeValue::Target => "target",
        WedgeValue::TargetClutter => "target_clutter",
    }
}
