//! Line-delimited JSON trial traces and their text replay.
//!
//! A trace is one `header` line, one `tick` line per tick, and an optional
//! closing `result` line:
//!
//! ```text
//! {"type":"header","v":1,"source":"trial","system":"RLGS","map":"home",...}
//! {"type":"tick","tick":0,"pose":{...},"human":{...},"wedges":[...],...}
//! {"type":"result","ticks":14,"elapsed_s":28.0,"success":true,"correct":true}
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{SystemKind, TickRecord, TrialResult};
use crate::world::{Cell, RobotPose, World};

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub v: u32,
    /// `trial` for simulated runs, `session` for live operator sessions.
    pub source: String,
    pub system: SystemKind,
    pub map: String,
    pub seed: u64,
    pub start: RobotPose,
    /// Geodesic start distance in meters; absent when the target is unreachable.
    pub start_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOutcome {
    pub ticks: u32,
    pub elapsed_s: f64,
    pub success: bool,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum TraceLine {
    Header(TraceHeader),
    Tick(TickRecord),
    Result(TraceOutcome),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub ticks: Vec<TickRecord>,
    pub outcome: Option<TraceOutcome>,
}

impl Trace {
    pub fn from_trial(result: &TrialResult, map: &str) -> Self {
        Trace {
            header: TraceHeader {
                v: TRACE_VERSION,
                source: "trial".into(),
                system: result.system,
                map: map.into(),
                seed: result.seed,
                start: result.start,
                start_distance: result.start_distance.is_finite().then_some(result.start_distance),
            },
            ticks: result.trace.clone(),
            outcome: Some(TraceOutcome {
                ticks: result.ticks,
                elapsed_s: result.elapsed_s,
                success: result.success,
                correct: result.correct,
            }),
        }
    }

    pub fn header_line(&self) -> Result<String> {
        Ok(serde_json::to_string(&TraceLine::Header(self.header.clone()))?)
    }

    pub fn tick_line(t: &TickRecord) -> Result<String> {
        Ok(serde_json::to_string(&TraceLine::Tick(t.clone()))?)
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut s = self.header_line()? + "\n";
        for t in &self.ticks {
            s += &Self::tick_line(t)?;
            s.push('\n');
        }
        if let Some(o) = &self.outcome {
            s += &serde_json::to_string(&TraceLine::Result(o.clone()))?;
            s.push('\n');
        }
        Ok(s)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let header = match lines.next() {
            Some((_, l)) => match serde_json::from_str(l)? {
                TraceLine::Header(h) => h,
                _ => return Err(Error::Trace("first line must be a header".into())),
            },
            None => return Err(Error::Trace("empty trace".into())),
        };
        if header.v != TRACE_VERSION {
            return Err(Error::Trace(format!("version {} not supported", header.v)));
        }
        let mut ticks = Vec::new();
        let mut outcome = None;
        for (i, l) in lines {
            if outcome.is_some() {
                return Err(Error::Trace(format!("line {}: content after result", i + 1)));
            }
            match serde_json::from_str(l)? {
                TraceLine::Tick(t) => ticks.push(t),
                TraceLine::Result(o) => outcome = Some(o),
                TraceLine::Header(_) => return Err(Error::Trace(format!("line {}: second header", i + 1))),
            }
        }
        Ok(Trace { header, ticks, outcome })
    }
}

fn heading_glyph(h: u8) -> char {
    ['>', '/', '^', '\\', '<', '/', 'v', '\\'][h as usize % 8]
}

/// One text frame: a status line, the wedge strip, and the map with the robot.
pub fn render_frame(world: &World, t: &TickRecord) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "tick {:>4}  cell ({},{}) heading {}  focus {}",
        t.tick, t.pose.cell.row, t.pose.cell.col, t.pose.heading, t.human.focus
    );
    if let Some(a) = t.indicator {
        let _ = write!(s, "  indicator {a}");
    }
    if let Some(i) = &t.intent {
        match i.wedge() {
            Some(w) => {
                let _ = write!(s, "  intent {w}");
            }
            None => s.push_str("  intent -"),
        }
    }
    if let Some(m) = t.human_move {
        let _ = write!(s, "  human {m}");
    }
    if let Some(c) = t.command {
        let _ = write!(s, "  base {c}");
    }
    s.push('\n');
    s.push_str("wedges ");
    for (k, v) in t.wedges.0.iter().enumerate() {
        let glyph = match v.digit() {
            0 => '.',
            1 => 'c',
            2 => 'T',
            _ => 'X',
        };
        if k == t.human.focus.get() {
            let _ = write!(s, "[{glyph}]");
        } else {
            let _ = write!(s, " {glyph} ");
        }
    }
    s.push('\n');
    for (r, row) in world.grid_text().iter().enumerate() {
        for (c, ch) in row.chars().enumerate() {
            let cell = Cell::new(r as i32, c as i32);
            let glyph = if cell == t.pose.cell {
                heading_glyph(t.pose.heading.get())
            } else if cell == world.target().cell {
                'T'
            } else if world.objects.iter().any(|o| o.cell == cell) {
                'o'
            } else {
                ch
            };
            s.push(glyph);
        }
        s.push('\n');
    }
    s
}

/// Every frame of a trace, followed by its outcome line when present.
pub fn render_trace(world: &World, trace: &Trace) -> String {
    let mut s = format!(
        "{} on {} (seed {}, {})\n\n",
        trace.header.system, trace.header.map, trace.header.seed, trace.header.source
    );
    for t in &trace.ticks {
        s += &render_frame(world, t);
        s.push('\n');
    }
    if let Some(o) = &trace.outcome {
        let _ = writeln!(
            s,
            "outcome: {} after {} ticks ({} s), correct={}",
            if o.success { "found" } else { "not found" },
            o.ticks,
            o.elapsed_s,
            o.correct
        );
    }
    s
}
