//! The abstract guidance MDP used for training.
//!
//! A state is an [`EgoState`]. `left`/`right` show an indicator; the operator
//! follows it with probability `p_comply` and otherwise looks one wedge in a
//! random direction. `confirm` ends the episode and pays off on whether the
//! focused wedge holds the target.

mod value_iteration;

pub use value_iteration::{oracle_agreement, solve_value_iteration, ValueIterationReport, AGREEMENT_TOL};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wedge::{EgoState, GuidanceAction, StateIndex, WedgeValue, NUM_STATES, WEDGES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MdpConfig {
    /// Probability that the operator follows a left/right indicator.
    pub p_comply: f64,
    pub r_confirm_hit: f64,
    pub r_confirm_miss: f64,
    /// Cost of an indicator landing on an uncluttered wedge.
    pub c_small: f64,
    /// Cost of an indicator landing on a cluttered wedge.
    pub c_large: f64,
    /// Episode cap; reaching it truncates without a terminal reward.
    pub max_steps: u32,
}

impl Default for MdpConfig {
    fn default() -> Self {
        MdpConfig {
            p_comply: 0.8,
            r_confirm_hit: 250.0,
            r_confirm_miss: -250.0,
            c_small: -3.0,
            c_large: -15.0,
            max_steps: 100,
        }
    }
}

impl MdpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_comply) {
            return Err(Error::Config(format!("p_comply {} not in [0, 1]", self.p_comply)));
        }
        if !(self.r_confirm_hit > 0.0 && self.r_confirm_miss < 0.0) {
            return Err(Error::Config("need r_confirm_hit > 0 > r_confirm_miss".into()));
        }
        if !(self.c_large < self.c_small && self.c_small < 0.0) {
            return Err(Error::Config("need c_large < c_small < 0".into()));
        }
        Ok(())
    }
}

/// Initial-state distribution for training episodes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Clutter wedges besides the target's; absent means each non-target wedge
    /// is cluttered with probability 1/2, so every clutter pattern is equally likely.
    pub n_clutter_wedges: Option<u8>,
    /// Whether the target wedge also holds clutter; absent means a fair coin.
    pub target_coincides_clutter: Option<bool>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        match self.n_clutter_wedges {
            Some(n) if n as usize > WEDGES - 1 => Err(Error::Config(format!("n_clutter_wedges {n} not in [0, 7]"))),
            _ => Ok(()),
        }
    }

    /// Whether `s` can be produced by [`initial_state`] under this config.
    pub fn supports(&self, s: &EgoState) -> bool {
        let targets: Vec<_> = s.target_offsets().collect();
        if targets.len() != 1 {
            return false;
        }
        let t = targets[0].get();
        let clutter = (0..WEDGES).filter(|&k| k != t && s.0[k] == WedgeValue::Clutter).count();
        let n_ok = self.n_clutter_wedges.is_none_or(|n| n as usize == clutter);
        let c_ok = self.target_coincides_clutter.is_none_or(|c| c == s.0[t].contains_clutter());
        n_ok && c_ok
    }
}

/// Every state an episode can visit: the support of [`initial_state`] closed
/// under left and right transitions, in index order.
pub fn reachable_states(cfg: &ScenarioConfig) -> Vec<StateIndex> {
    let mut seen = vec![false; NUM_STATES];
    let mut frontier: Vec<EgoState> = StateIndex::all().map(EgoState::decode).filter(|s| cfg.supports(s)).collect();
    for s in &frontier {
        seen[s.encode().get()] = true;
    }
    while let Some(s) = frontier.pop() {
        for k in [1, -1] {
            let next = s.shift_focus(k);
            let i = next.encode().get();
            if !seen[i] {
                seen[i] = true;
                frontier.push(next);
            }
        }
    }
    StateIndex::all().filter(|i| seen[i.get()]).collect()
}

/// Which way a left/right indicator resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    Comply,
    /// The operator looked around instead, one wedge left (`true`) or right.
    Stray {
        left: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next: EgoState,
    pub reward: f64,
    pub terminal: bool,
}

/// Samples a start state with exactly one target wedge.
pub fn initial_state<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> EgoState {
    let target = rng.random_range(0..WEDGES);
    let coincide = match cfg.target_coincides_clutter {
        Some(c) => c,
        None => rng.random_bool(0.5),
    };
    let others: Vec<usize> = (0..WEDGES).filter(|&k| k != target).collect();
    let mut values = [WedgeValue::Empty; WEDGES];
    match cfg.n_clutter_wedges {
        Some(n) => {
            let n = (n as usize).min(WEDGES - 1);
            for i in sample(rng, others.len(), n).into_iter() {
                values[others[i]] = WedgeValue::Clutter;
            }
        }
        // every clutter pattern equally likely
        None => {
            for &k in &others {
                if rng.random_bool(0.5) {
                    values[k] = WedgeValue::Clutter;
                }
            }
        }
    }
    values[target] = WedgeValue::from_parts(true, coincide);
    EgoState(values)
}

/// Deterministic part of the transition once the operator's response is known.
pub fn transition_with(s: &EgoState, a: GuidanceAction, response: Response) -> EgoState {
    match (a, response) {
        (GuidanceAction::Confirm, _) => *s,
        (_, Response::Comply) => s.shift_focus(a.focus_delta()),
        (_, Response::Stray { left }) => s.shift_focus(if left { 1 } else { -1 }),
    }
}

/// Samples the operator's response to `a`. Always consumes two draws.
pub fn sample_response<R: Rng + ?Sized>(cfg: &MdpConfig, rng: &mut R) -> Response {
    let u: f64 = rng.random();
    let left: bool = rng.random();
    if u < cfg.p_comply {
        Response::Comply
    } else {
        Response::Stray { left }
    }
}

pub fn transition<R: Rng + ?Sized>(s: &EgoState, a: GuidanceAction, cfg: &MdpConfig, rng: &mut R) -> EgoState {
    if a == GuidanceAction::Confirm {
        return *s;
    }
    transition_with(s, a, sample_response(cfg, rng))
}

pub fn reward(_s: &EgoState, a: GuidanceAction, s_next: &EgoState, cfg: &MdpConfig) -> f64 {
    let landed = s_next.focused();
    match a {
        GuidanceAction::Confirm if landed.contains_target() => cfg.r_confirm_hit,
        GuidanceAction::Confirm => cfg.r_confirm_miss,
        _ if landed.contains_clutter() => cfg.c_large,
        _ => cfg.c_small,
    }
}

pub fn step<R: Rng + ?Sized>(s: &EgoState, a: GuidanceAction, cfg: &MdpConfig, rng: &mut R) -> StepOutcome {
    let next = transition(s, a, cfg, rng);
    StepOutcome { next, reward: reward(s, a, &next, cfg), terminal: a == GuidanceAction::Confirm }
}
