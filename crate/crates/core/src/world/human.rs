use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ControlCommand;
use crate::error::{Error, Result};
use crate::wedge::{GuidanceAction, WedgeIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadMotion {
    Left,
    Right,
    #[default]
    None,
}

/// The operator's gaze, as a robot-frame wedge, and their latest head turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HumanState {
    pub focus: WedgeIndex,
    pub last_motion: HeadMotion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanMove {
    LookLeft,
    LookRight,
    MoveForward,
    MoveBackward,
}

impl HumanMove {
    pub const ALL: [HumanMove; 4] =
        [HumanMove::LookLeft, HumanMove::LookRight, HumanMove::MoveForward, HumanMove::MoveBackward];

    pub fn is_look(self) -> bool {
        matches!(self, HumanMove::LookLeft | HumanMove::LookRight)
    }
}

impl std::fmt::Display for HumanMove {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HumanMove::LookLeft => "look_left",
            HumanMove::LookRight => "look_right",
            HumanMove::MoveForward => "move_forward",
            HumanMove::MoveBackward => "move_backward",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HumanConfig {
    /// Probability of following a left/right indicator.
    pub p_follow: f64,
}

impl Default for HumanConfig {
    fn default() -> Self {
        HumanConfig { p_follow: 0.95 }
    }
}

impl HumanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_follow) {
            return Err(Error::Config(format!("p_follow {} not in [0, 1]", self.p_follow)));
        }
        Ok(())
    }
}

/// Picks the virtual operator's next action.
///
/// `indicator` is what the interface shows; unguided systems pass `None`.
/// A confirm highlight carries no direction and is treated like no
/// indicator. Always consumes two draws.
pub fn virtual_human_step<R: Rng + ?Sized>(
    indicator: Option<GuidanceAction>,
    cfg: &HumanConfig,
    rng: &mut R,
) -> HumanMove {
    let u: f64 = rng.random();
    let fallback = HumanMove::ALL[rng.random_range(0..4)];
    match indicator {
        Some(GuidanceAction::Left) if u < cfg.p_follow => HumanMove::LookLeft,
        Some(GuidanceAction::Right) if u < cfg.p_follow => HumanMove::LookRight,
        _ => fallback,
    }
}

/// Applies a move to the operator's state; move actions become base commands.
pub fn apply_human_move(h: HumanState, m: HumanMove) -> (HumanState, Option<ControlCommand>) {
    match m {
        HumanMove::LookLeft => (HumanState { focus: h.focus.shift(1), last_motion: HeadMotion::Left }, None),
        HumanMove::LookRight => (HumanState { focus: h.focus.shift(-1), last_motion: HeadMotion::Right }, None),
        HumanMove::MoveForward => (HumanState { last_motion: HeadMotion::None, ..h }, Some(ControlCommand::Forward)),
        HumanMove::MoveBackward => (HumanState { last_motion: HeadMotion::None, ..h }, Some(ControlCommand::Backward)),
    }
}
