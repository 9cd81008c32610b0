//! How much room the checkpoint curve has: scores the exact value-iteration
//! policy, the hand-coded baseline and a trained policy on the shared
//! evaluation set, and counts the states where the baseline is suboptimal.
//!
//! ```text
//! cargo run --release --example oracle_headroom
//! ```

use wedgeguide::harness::{evaluate_policy, EvalConfig};
use wedgeguide::policy::{fgs_policy, greedy_policy};
use wedgeguide::{
    oracle_agreement, reachable_states, solve_value_iteration, train, LearnerConfig, MdpConfig, ScenarioConfig,
};

fn main() -> wedgeguide::Result<()> {
    let mdp = MdpConfig::default();
    let scenario = ScenarioConfig::default();
    let eval = EvalConfig::default();
    let (oracle, report) = solve_value_iteration(&mdp, 0.95, 1e-9)?;
    let states = reachable_states(&scenario);
    println!("value iteration: {} sweeps, final delta {:.1e}", report.iterations, report.final_delta);

    let oracle_policy = greedy_policy(&oracle);
    let fgs = fgs_policy();
    let learned = greedy_policy(&train(&mdp, &scenario, &LearnerConfig::default())?.q);
    println!("{:>10} {:>12} {:>12}", "policy", "mean return", "agreement");
    for (name, p) in [("oracle", &oracle_policy), ("FGS", &fgs), ("learned", &learned)] {
        println!(
            "{name:>10} {:>12.3} {:>12.4}",
            evaluate_policy(p, &scenario, &eval),
            oracle_agreement(p, &oracle, &states)
        );
    }
    Ok(())
}
