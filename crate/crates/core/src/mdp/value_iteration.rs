use crate::error::{Error, Result};
use crate::policy::GuidancePolicy;
use crate::qtable::QTable;
use crate::wedge::{EgoState, GuidanceAction, StateIndex, NUM_STATES};

use super::{reward, transition_with, MdpConfig, Response};

#[derive(Debug, Clone)]
pub struct ValueIterationReport {
    pub iterations: usize,
    pub final_delta: f64,
}

const MAX_ITERATIONS: usize = 100_000;

/// Exact Bellman-optimal action values of the guidance MDP.
///
/// Sweeps synchronously until the largest change of any Q entry drops below
/// `tol`. `confirm` is terminal, so its value is the immediate reward.
pub fn solve_value_iteration(cfg: &MdpConfig, gamma: f64, tol: f64) -> Result<(QTable, ValueIterationReport)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Config(format!("discount {gamma} not in (0, 1)")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Config(format!("tolerance {tol} must be positive")));
    }
    cfg.validate()?;

    let p_left_when_left = cfg.p_comply + (1.0 - cfg.p_comply) / 2.0;
    let p_other = (1.0 - cfg.p_comply) / 2.0;

    // Successor indices and rewards are fixed; precompute them once.
    struct Succ {
        ccw: usize,
        cw: usize,
        r_ccw: f64,
        r_cw: f64,
        confirm: f64,
    }
    let succ: Vec<Succ> = StateIndex::all()
        .map(|i| {
            let s = EgoState::decode(i);
            let ccw = transition_with(&s, GuidanceAction::Left, Response::Comply);
            let cw = transition_with(&s, GuidanceAction::Right, Response::Comply);
            Succ {
                ccw: ccw.encode().get(),
                cw: cw.encode().get(),
                // the move reward only depends on where the focus lands
                r_ccw: reward(&s, GuidanceAction::Left, &ccw, cfg),
                r_cw: reward(&s, GuidanceAction::Right, &cw, cfg),
                confirm: reward(&s, GuidanceAction::Confirm, &s, cfg),
            }
        })
        .collect();

    let mut v = vec![0.0f64; NUM_STATES];
    let mut q = vec![[0.0f64; 3]; NUM_STATES];
    let mut delta = f64::INFINITY;
    let mut iterations = 0;
    while delta >= tol {
        if iterations == MAX_ITERATIONS {
            return Err(Error::Config(format!(
                "value iteration did not converge in {MAX_ITERATIONS} sweeps (delta {delta})"
            )));
        }
        delta = 0.0;
        let mut next_v = vec![0.0f64; NUM_STATES];
        for (i, s) in succ.iter().enumerate() {
            let via_ccw = s.r_ccw + gamma * v[s.ccw];
            let via_cw = s.r_cw + gamma * v[s.cw];
            let row = [
                s.confirm,
                p_left_when_left * via_ccw + p_other * via_cw,
                p_left_when_left * via_cw + p_other * via_ccw,
            ];
            for a in 0..3 {
                delta = delta.max((row[a] - q[i][a]).abs());
            }
            q[i] = row;
            next_v[i] = row[0].max(row[1]).max(row[2]);
        }
        v = next_v;
        iterations += 1;
    }

    let mut table = QTable::zeros();
    for i in StateIndex::all() {
        for a in GuidanceAction::ALL {
            table.set(i, a, q[i.get()][a.index()]);
        }
    }
    Ok((table, ValueIterationReport { iterations, final_delta: delta }))
}

/// Tolerance within which a greedy action's oracle value counts as optimal.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Fraction of `states` where `policy` picks an action whose oracle value is
/// within [`AGREEMENT_TOL`] of the oracle optimum; exact ties accept either action.
pub fn oracle_agreement(policy: &GuidancePolicy, oracle: &QTable, states: &[StateIndex]) -> f64 {
    if states.is_empty() {
        return 1.0;
    }
    let hits =
        states.iter().filter(|&&s| oracle.get(s, policy.action(s)) >= oracle.max_value(s) - AGREEMENT_TOL).count();
    hits as f64 / states.len() as f64
}
