//! Guidance policies and the online-learning wrapper used at deployment.

use serde::{Deserialize, Serialize};

use crate::learning::{q_update, LearnerConfig};
use crate::mdp::{reward, MdpConfig};
use crate::qtable::QTable;
use crate::wedge::{EgoState, GuidanceAction, StateIndex, NUM_STATES};

/// One action per egocentric state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuidancePolicy {
    actions: Vec<GuidanceAction>,
}

impl GuidancePolicy {
    pub fn action(&self, s: StateIndex) -> GuidanceAction {
        self.actions[s.get()]
    }

    pub fn from_fn(f: impl Fn(StateIndex) -> GuidanceAction) -> Self {
        GuidancePolicy { actions: StateIndex::all().map(f).collect() }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Greedy argmax over `q`, ties broken confirm < left < right.
pub fn greedy_policy(q: &QTable) -> GuidancePolicy {
    let actions: Vec<_> = StateIndex::all().map(|s| q.greedy(s)).collect();
    debug_assert_eq!(actions.len(), NUM_STATES);
    GuidancePolicy { actions }
}

/// Source of guidance actions inside a closed loop.
pub trait Guidance {
    fn action(&self, s: &EgoState) -> GuidanceAction;

    /// Called once the consequence of an indicator is known.
    fn observe(&mut self, _s: &EgoState, _a: GuidanceAction, _next: &EgoState) {}
}

impl Guidance for GuidancePolicy {
    fn action(&self, s: &EgoState) -> GuidanceAction {
        GuidancePolicy::action(self, s.encode())
    }
}

/// Greedy guidance that keeps applying Q-learning updates while it runs.
#[derive(Debug, Clone)]
pub struct OnlineGuidance {
    pub q: QTable,
    pub learner: LearnerConfig,
    pub mdp: MdpConfig,
}

impl Guidance for OnlineGuidance {
    fn action(&self, s: &EgoState) -> GuidanceAction {
        self.q.greedy(s.encode())
    }

    fn observe(&mut self, s: &EgoState, a: GuidanceAction, next: &EgoState) {
        let r = reward(s, a, next, &self.mdp);
        let terminal = a == GuidanceAction::Confirm;
        // inputs come from finite tables and rewards, so this cannot fail
        let _ = q_update(&mut self.q, s.encode(), a, r, next.encode(), terminal, &self.learner);
    }
}

/// The hand-coded baseline's choice: shortest rotation to the nearest target.
///
/// Returns `None` when the state holds no target. Antipodal ties go left.
pub fn fgs_action(s: &EgoState) -> Option<GuidanceAction> {
    use crate::wedge::{circular_distance, ShorterDirection, WedgeIndex};
    let (_, dir) = s.target_offsets().map(|t| circular_distance(WedgeIndex::FORWARD, t)).min_by_key(|(d, _)| *d)?;
    Some(match dir {
        ShorterDirection::None => GuidanceAction::Confirm,
        ShorterDirection::Left | ShorterDirection::Tie => GuidanceAction::Left,
        ShorterDirection::Right => GuidanceAction::Right,
    })
}

/// The hand-coded baseline as a total policy; target-free states map to confirm.
pub fn fgs_policy() -> GuidancePolicy {
    GuidancePolicy::from_fn(|i| fgs_action(&EgoState::decode(i)).unwrap_or(GuidanceAction::Confirm))
}
