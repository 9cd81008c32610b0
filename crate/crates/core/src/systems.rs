//! The five compared systems as closed-loop trial executors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intent::{controller, Evidence, FilterConfig, IntentEstimate, IntentFilter};
use crate::policy::{fgs_action, Guidance, GuidancePolicy};
use crate::rng::{mix, stream, Stream};
use crate::wedge::{to_egocentric, GuidanceAction, WedgeIndex, WedgeVector};
use crate::world::{
    apply_human_move, detect, step_robot, target_in_focus, translate, virtual_human_step, ControlCommand,
    DetectorConfig, HeadMotion, HumanConfig, HumanMove, HumanState, RobotPose, World,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SystemKind {
    /// Fixed monocular view; looking around turns the whole robot.
    #[serde(rename = "MFO")]
    Mfo,
    /// Full 360° view, no guidance.
    #[serde(rename = "ADV")]
    Adv,
    /// Hand-coded shortest-rotation guidance.
    #[serde(rename = "FGS")]
    Fgs,
    /// Learned guidance.
    #[serde(rename = "RLGS")]
    Rlgs,
    /// Learned guidance plus intent-driven base motion.
    #[serde(rename = "GHAL360")]
    Ghal360,
}

impl SystemKind {
    pub const ALL: [SystemKind; 5] =
        [SystemKind::Mfo, SystemKind::Adv, SystemKind::Fgs, SystemKind::Rlgs, SystemKind::Ghal360];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Mfo => "MFO",
            SystemKind::Adv => "ADV",
            SystemKind::Fgs => "FGS",
            SystemKind::Rlgs => "RLGS",
            SystemKind::Ghal360 => "GHAL360",
        }
    }

    pub fn shows_indicators(self) -> bool {
        matches!(self, SystemKind::Fgs | SystemKind::Rlgs | SystemKind::Ghal360)
    }

    pub fn needs_policy(self) -> bool {
        matches!(self, SystemKind::Rlgs | SystemKind::Ghal360)
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SystemKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown system {s:?}")))
    }
}

/// Direction of the operator's forward/backward commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveFrame {
    /// Along the robot's heading; only rotations of the base change it.
    #[default]
    Heading,
    /// Toward the wedge the operator is looking at.
    Gaze,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialConfig {
    /// Ticks before a trial is abandoned.
    pub budget: u32,
    /// Wall-clock seconds represented by one tick.
    pub tick_seconds: f64,
    /// Keep the per-tick trace in the result.
    pub record_trace: bool,
    pub move_frame: MoveFrame,
    pub detector: DetectorConfig,
    pub human: HumanConfig,
    pub filter: FilterConfig,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            budget: 300,
            tick_seconds: 2.0,
            record_trace: true,
            move_frame: MoveFrame::Heading,
            detector: DetectorConfig::default(),
            human: HumanConfig::default(),
            filter: FilterConfig::default(),
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        self.detector.validate()?;
        self.human.validate()?;
        self.filter.validate()?;
        if !(self.tick_seconds.is_finite() && self.tick_seconds > 0.0) {
            return Err(Error::Config("tick_seconds must be positive".into()));
        }
        Ok(())
    }
}

/// Everything that happened on one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u32,
    pub pose: RobotPose,
    pub human: HumanState,
    pub wedges: WedgeVector,
    pub indicator: Option<GuidanceAction>,
    pub human_move: Option<HumanMove>,
    pub intent: Option<IntentEstimate>,
    pub command: Option<ControlCommand>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub system: SystemKind,
    pub seed: u64,
    pub start: RobotPose,
    pub start_distance: f64,
    pub ticks: u32,
    pub elapsed_s: f64,
    pub success: bool,
    /// The terminating detection agreed with ground truth.
    pub correct: bool,
    pub trace: Vec<TickRecord>,
}

/// Seeds for `n` paired trials; trial `k` of every system uses seed `k`.
pub fn paired_seeds(n: usize, base_seed: u64) -> Vec<u64> {
    (0..n as u64).map(|k| mix(base_seed, k)).collect()
}

/// The indicator a system shows for a detection, or `None`.
///
/// Indicators appear only when the detection contains the target.
pub fn indicator_for(
    kind: SystemKind,
    detection: &WedgeVector,
    focus: WedgeIndex,
    guidance: Option<&dyn Guidance>,
) -> Option<GuidanceAction> {
    if !kind.shows_indicators() || !detection.has_target() {
        return None;
    }
    let ego = to_egocentric(detection, focus);
    match kind {
        SystemKind::Fgs => fgs_action(&ego),
        _ => guidance.map(|g| g.action(&ego)),
    }
}

/// Runs one trial with a frozen policy.
pub fn run_trial(
    kind: SystemKind,
    world: &World,
    policy: Option<&GuidancePolicy>,
    cfg: &TrialConfig,
    start: RobotPose,
    seed: u64,
) -> Result<TrialResult> {
    match policy {
        Some(p) => {
            let mut p = p;
            run_trial_with(kind, world, Some(&mut p), cfg, start, seed)
        }
        None => run_trial_with(kind, world, None, cfg, start, seed),
    }
}

impl Guidance for &GuidancePolicy {
    fn action(&self, s: &crate::wedge::EgoState) -> GuidanceAction {
        GuidancePolicy::action(self, s.encode())
    }
}

/// Runs one trial; `guidance` may learn online through [`Guidance::observe`].
pub fn run_trial_with(
    kind: SystemKind,
    world: &World,
    mut guidance: Option<&mut dyn Guidance>,
    cfg: &TrialConfig,
    start: RobotPose,
    seed: u64,
) -> Result<TrialResult> {
    cfg.validate()?;
    if kind.needs_policy() && guidance.is_none() {
        return Err(Error::MissingPolicy(kind.name().into()));
    }
    if !world.is_passable(start.cell) {
        return Err(Error::OutOfRange(format!("start cell ({}, {}) is not free", start.cell.row, start.cell.col)));
    }
    let start_distance = world.geodesic_distance(start.cell).unwrap_or(f64::INFINITY);

    let mut human_rng = stream(seed, Stream::Human);
    let mut detector_rng = stream(seed, Stream::Detector);
    let mut filter_rng = stream(seed, Stream::Filter);
    let mut filter = match kind {
        SystemKind::Ghal360 if cfg.filter.enabled => Some(IntentFilter::new(cfg.filter.clone())?),
        _ => None,
    };

    let mut pose = start;
    let mut human = HumanState::default();
    let mut trace = Vec::new();
    let mut tick = 0;
    let (success, correct) = loop {
        let detection = detect(world, pose, &cfg.detector, &mut detector_rng);
        let indicator = indicator_for(kind, &detection, human.focus, guidance.as_deref());
        // the filter reads the head pose at the start of the tick
        let intent = filter.as_mut().map(|f| {
            let evidence = Evidence { head_motion: human.last_motion, focused: human.focus };
            f.step(&evidence, &mut filter_rng)
        });
        let mut record =
            TickRecord { tick, pose, human, wedges: detection, indicator, human_move: None, intent, command: None };

        if detection.get(human.focus).contains_target() {
            let correct = target_in_focus(world, pose, &human, &cfg.detector);
            if cfg.record_trace {
                trace.push(record);
            }
            break (true, correct);
        }
        if tick >= cfg.budget {
            if cfg.record_trace {
                trace.push(record);
            }
            break (false, false);
        }

        let m = virtual_human_step(indicator, &cfg.human, &mut human_rng);
        record.human_move = Some(m);
        let issued_move = !m.is_look();
        if kind == SystemKind::Mfo {
            // the view is locked forward, so looking turns the base
            pose = match m {
                HumanMove::LookLeft => step_robot(world, pose, ControlCommand::RotateLeft),
                HumanMove::LookRight => step_robot(world, pose, ControlCommand::RotateRight),
                HumanMove::MoveForward => step_robot(world, pose, ControlCommand::Forward),
                HumanMove::MoveBackward => step_robot(world, pose, ControlCommand::Backward),
            };
        } else {
            let before = human;
            let (next, cmd) = apply_human_move(human, m);
            human = next;
            if let Some(c) = cmd {
                pose = match cfg.move_frame {
                    MoveFrame::Heading => step_robot(world, pose, c),
                    MoveFrame::Gaze => {
                        let gaze = pose.heading.turned(human.focus.get() as i64);
                        translate(world, pose, gaze, c == ControlCommand::Backward)
                    }
                };
            }
            if let (Some(a), Some(g)) = (indicator, guidance.as_deref_mut()) {
                let before_ego = to_egocentric(&detection, before.focus);
                let after_ego = to_egocentric(&detection, human.focus);
                g.observe(&before_ego, a, &after_ego);
            }
        }

        if let (Some(f), Some(estimate)) = (filter.as_mut(), intent) {
            if !issued_move {
                let c = controller(&estimate);
                record.command = Some(c);
                pose = step_robot(world, pose, c);
                // turning the base keeps the operator's world-frame gaze
                let turn = match c {
                    ControlCommand::RotateLeft => 1,
                    ControlCommand::RotateRight => -1,
                    _ => 0,
                };
                if turn != 0 {
                    human.focus = human.focus.shift(-turn);
                    f.set.rotate(-turn);
                }
            }
        }
        if kind == SystemKind::Mfo {
            human.last_motion = HeadMotion::None;
        }

        if cfg.record_trace {
            trace.push(record);
        }
        tick += 1;
    };

    Ok(TrialResult {
        system: kind,
        seed,
        start,
        start_distance,
        ticks: tick,
        elapsed_s: tick as f64 * cfg.tick_seconds,
        success,
        correct,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{load_map, Cell, Heading};

    fn corridor() -> World {
        load_map("..........\n", "target = cup\nobject = cup 0 9\n").unwrap()
    }

    #[test]
    fn parse_and_display() {
        for k in SystemKind::ALL {
            assert_eq!(k.name().parse::<SystemKind>().unwrap(), k);
        }
        assert!("nope".parse::<SystemKind>().is_err());
        assert_eq!(serde_json::to_string(&SystemKind::Ghal360).unwrap(), "\"GHAL360\"");
    }

    #[test]
    fn target_in_view_at_start() {
        let w = corridor();
        let start = RobotPose { cell: Cell::new(0, 6), heading: Heading::EAST };
        let cfg = TrialConfig { detector: DetectorConfig::default().noiseless(), ..Default::default() };
        for k in [SystemKind::Mfo, SystemKind::Adv, SystemKind::Fgs] {
            let r = run_trial(k, &w, None, &cfg, start, 1).unwrap();
            assert!(r.success && r.correct);
            assert_eq!(r.ticks, 0);
            assert_eq!(r.elapsed_s, 0.0);
        }
    }

    #[test]
    fn walled_off_target_fails_at_budget() {
        let w = load_map("....#...\n....#...\n", "target = cup\nobject = cup 0 7\n").unwrap();
        let cfg = TrialConfig { budget: 50, ..Default::default() };
        let start = RobotPose { cell: Cell::new(1, 0), heading: Heading::EAST };
        for k in [SystemKind::Mfo, SystemKind::Adv, SystemKind::Fgs] {
            let r = run_trial(k, &w, None, &cfg, start, 9).unwrap();
            assert!(!r.success && !r.correct);
            assert_eq!(r.ticks, 50);
            assert_eq!(r.elapsed_s, 100.0);
            assert_eq!(r.trace.len(), 51);
        }
    }

    #[test]
    fn learning_systems_need_a_policy() {
        let w = corridor();
        let start = RobotPose { cell: Cell::new(0, 0), heading: Heading::EAST };
        let err = run_trial(SystemKind::Rlgs, &w, None, &TrialConfig::default(), start, 0).unwrap_err();
        assert!(matches!(err, Error::MissingPolicy(_)));
    }

    #[test]
    fn pairing_is_stable() {
        assert_eq!(paired_seeds(5, 3), paired_seeds(5, 3));
        let a = paired_seeds(5, 3);
        let b = paired_seeds(5, 4);
        assert!(a.iter().zip(&b).all(|(x, y)| x != y));
    }
}
