//! Tabular Q-learning over the abstract guidance MDP.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{initial_state, step, MdpConfig, ScenarioConfig};
use crate::policy::{greedy_policy, GuidancePolicy};
use crate::qtable::QTable;
use crate::rng::{stream, Stream};
use crate::wedge::{GuidanceAction, StateIndex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub alpha: f64,
    pub gamma: f64,
    /// Exploration rate at the first episode.
    pub epsilon: f64,
    /// Exploration rate at the last episode; interpolated linearly in between.
    pub epsilon_final: f64,
    pub episodes: u32,
    pub checkpoint_every: u32,
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            alpha: 0.1,
            gamma: 0.95,
            epsilon: 0.1,
            epsilon_final: 0.01,
            episodes: 15_000,
            checkpoint_every: 100,
            seed: 0,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha {} not in (0, 1]", self.alpha)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Config(format!("gamma {} not in (0, 1)", self.gamma)));
        }
        for e in [self.epsilon, self.epsilon_final] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Config(format!("epsilon {e} not in [0, 1]")));
            }
        }
        if self.checkpoint_every == 0 {
            return Err(Error::Config("checkpoint_every must be positive".into()));
        }
        Ok(())
    }

    pub fn epsilon_at(&self, episode: u32) -> f64 {
        if self.episodes <= 1 {
            return self.epsilon;
        }
        let t = episode as f64 / (self.episodes - 1) as f64;
        self.epsilon + (self.epsilon_final - self.epsilon) * t
    }
}

/// One temporal-difference update; returns the new `Q(s, a)`.
///
/// Terminal transitions do not bootstrap from `s_next`.
pub fn q_update(
    q: &mut QTable,
    s: StateIndex,
    a: GuidanceAction,
    r: f64,
    s_next: StateIndex,
    terminal: bool,
    cfg: &LearnerConfig,
) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::NonFinite("reward"));
    }
    if !(cfg.alpha.is_finite() && cfg.gamma.is_finite()) {
        return Err(Error::NonFinite("learning parameter"));
    }
    let bootstrap = if terminal { 0.0 } else { cfg.gamma * q.max_value(s_next) };
    let old = q.get(s, a);
    let new = old + cfg.alpha * (r + bootstrap - old);
    q.set(s, a, new);
    q.record_visit(s, a);
    Ok(new)
}

/// Epsilon-greedy selection with the fixed greedy tie order.
pub fn select_action<R: Rng + ?Sized>(q: &QTable, s: StateIndex, epsilon: f64, rng: &mut R) -> GuidanceAction {
    if rng.random::<f64>() < epsilon {
        GuidanceAction::ALL[rng.random_range(0..3)]
    } else {
        q.greedy(s)
    }
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    /// Number of episodes completed when the snapshot was taken.
    pub episode: u32,
    pub policy: GuidancePolicy,
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub q: QTable,
    pub checkpoints: Vec<Checkpoint>,
    /// Undiscounted return of every training episode.
    pub curve: Vec<f64>,
}

pub fn train(mdp: &MdpConfig, scenario: &ScenarioConfig, cfg: &LearnerConfig) -> Result<TrainingRun> {
    mdp.validate()?;
    scenario.validate()?;
    cfg.validate()?;

    let mut rng = stream(cfg.seed, Stream::Learner);
    let mut q = QTable::zeros();
    let mut curve = Vec::with_capacity(cfg.episodes as usize);
    let mut checkpoints = Vec::new();

    for episode in 0..cfg.episodes {
        let epsilon = cfg.epsilon_at(episode);
        let mut s = initial_state(scenario, &mut rng);
        let mut total = 0.0;
        for _ in 0..mdp.max_steps {
            let si = s.encode();
            let a = select_action(&q, si, epsilon, &mut rng);
            let out = step(&s, a, mdp, &mut rng);
            q_update(&mut q, si, a, out.reward, out.next.encode(), out.terminal, cfg)?;
            total += out.reward;
            s = out.next;
            if out.terminal {
                break;
            }
        }
        curve.push(total);
        let done = episode + 1;
        if done % cfg.checkpoint_every == 0 {
            checkpoints.push(Checkpoint { episode: done, policy: greedy_policy(&q) });
        }
    }
    Ok(TrainingRun { q, checkpoints, curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn terminal_update_from_zero() {
        let mut q = QTable::zeros();
        let s = StateIndex::new(2).unwrap();
        let v = q_update(&mut q, s, GuidanceAction::Confirm, 250.0, s, true, &LearnerConfig::default()).unwrap();
        assert_eq!(v, 25.0);
        assert_eq!(q.visits(s, GuidanceAction::Confirm), 1);
    }

    #[test]
    fn zero_td_error_is_fixed_point() {
        let s = StateIndex::new(10).unwrap();
        let n = StateIndex::new(11).unwrap();
        for alpha in [0.1, 0.5, 1.0] {
            let mut q = QTable::zeros();
            q.set(s, GuidanceAction::Left, 10.0);
            q.set(n, GuidanceAction::Right, 10.0);
            let cfg = LearnerConfig { alpha, gamma: 1.0, ..Default::default() };
            let v = q_update(&mut q, s, GuidanceAction::Left, 0.0, n, false, &cfg).unwrap();
            assert_eq!(v, 10.0);
        }
    }

    #[test]
    fn zero_alpha_leaves_table() {
        let mut q = QTable::zeros();
        let s = StateIndex::new(3).unwrap();
        q.set(s, GuidanceAction::Right, 7.0);
        let cfg = LearnerConfig { alpha: 0.0, ..Default::default() };
        let v = q_update(&mut q, s, GuidanceAction::Right, 100.0, s, false, &cfg).unwrap();
        assert_eq!(v, 7.0);
    }

    #[test]
    fn non_finite_reward_rejected() {
        let mut q = QTable::zeros();
        let s = StateIndex::new(3).unwrap();
        let cfg = LearnerConfig::default();
        assert!(q_update(&mut q, s, GuidanceAction::Left, f64::NAN, s, false, &cfg).is_err());
        assert_eq!(q.get(s, GuidanceAction::Left), 0.0);
    }

    #[test]
    fn greedy_selection() {
        let mut q = QTable::zeros();
        let s = StateIndex::new(5).unwrap();
        let mut rng = rng_from_seed(0);
        q.set(s, GuidanceAction::Right, 1.0);
        for _ in 0..100 {
            assert_eq!(select_action(&q, s, 0.0, &mut rng), GuidanceAction::Right);
        }
        let mut q = QTable::zeros();
        q.set(s, GuidanceAction::Right, -1.0);
        assert_eq!(select_action(&q, s, 0.0, &mut rng), GuidanceAction::Confirm);
    }

    #[test]
    fn full_exploration_is_uniform() {
        let q = QTable::zeros();
        let s = StateIndex::new(5).unwrap();
        let mut rng = rng_from_seed(1);
        let mut counts = [0usize; 3];
        let n = 100_000;
        for _ in 0..n {
            counts[select_action(&q, s, 1.0, &mut rng).index()] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn epsilon_schedule() {
        let cfg = LearnerConfig::default();
        assert_eq!(cfg.epsilon_at(0), 0.1);
        assert!((cfg.epsilon_at(cfg.episodes - 1) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn zero_episodes() {
        let cfg = LearnerConfig { episodes: 0, ..Default::default() };
        let run = train(&MdpConfig::default(), &ScenarioConfig::default(), &cfg).unwrap();
        assert!(run.curve.is_empty());
        assert!(run.checkpoints.is_empty());
        assert!(run.q.values().iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn deterministic_and_checkpoint_count() {
        let cfg = LearnerConfig { episodes: 1000, seed: 4, ..Default::default() };
        let a = train(&MdpConfig::default(), &ScenarioConfig::default(), &cfg).unwrap();
        let b = train(&MdpConfig::default(), &ScenarioConfig::default(), &cfg).unwrap();
        assert_eq!(a.curve, b.curve);
        assert_eq!(a.q.values(), b.q.values());
        assert_eq!(a.checkpoints.len(), 10);
        assert_eq!(a.checkpoints[9].episode, 1000);
    }
}
