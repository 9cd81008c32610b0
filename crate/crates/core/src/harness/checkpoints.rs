use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::EvalConfig;
use crate::error::Result;
use crate::learning::Checkpoint;
use crate::mdp::{initial_state, step, ScenarioConfig};
use crate::policy::{fgs_policy, GuidancePolicy};
use crate::rng::{mix, stream, Stream};

/// One point of the checkpoint curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: u32,
    pub mean_return: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointCurve {
    pub points: Vec<CurvePoint>,
    /// The hand-coded baseline on the same evaluation set.
    pub fgs_mean_return: f64,
}

/// Mean undiscounted return of `policy` over the shared evaluation set.
///
/// Episode `k` always replays the same start state and operator responses,
/// so every policy is scored on identical draws.
pub fn evaluate_policy(policy: &GuidancePolicy, scenario: &ScenarioConfig, cfg: &EvalConfig) -> f64 {
    let total: f64 = (0..cfg.episodes)
        .map(|k| {
            let mut rng = stream(mix(cfg.seed, k as u64), Stream::Evaluation);
            let mut s = initial_state(scenario, &mut rng);
            let mut ret = 0.0;
            for _ in 0..cfg.mdp.max_steps {
                let out = step(&s, policy.action(s.encode()), &cfg.mdp, &mut rng);
                ret += out.reward;
                s = out.next;
                if out.terminal {
                    break;
                }
            }
            ret
        })
        .sum();
    total / cfg.episodes.max(1) as f64
}

/// Scores every checkpoint and the hand-coded baseline on one evaluation set.
pub fn evaluate_checkpoints(
    checkpoints: &[Checkpoint],
    scenario: &ScenarioConfig,
    cfg: &EvalConfig,
) -> Result<CheckpointCurve> {
    scenario.validate()?;
    cfg.mdp.validate()?;
    let points = checkpoints
        .par_iter()
        .map(|c| CurvePoint { episode: c.episode, mean_return: evaluate_policy(&c.policy, scenario, cfg) })
        .collect();
    let fgs_mean_return = evaluate_policy(&fgs_policy(), scenario, cfg);
    Ok(CheckpointCurve { points, fgs_mean_return })
}
