//! Trains a guidance policy, prints the smoothed learning curve, and saves
//! the Q-table so the CLI can use it (`wedgeguide experiment --policy`).
//!
//! ```text
//! cargo run --release --example train_policy [-- <seed> <out.ghqt>]
//! ```

use std::path::PathBuf;

use wedgeguide::policy::greedy_policy;
use wedgeguide::{
    oracle_agreement, reachable_states, save_qtable, solve_value_iteration, train, LearnerConfig, MdpConfig,
    ScenarioConfig,
};

fn main() -> wedgeguide::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(0, |s| s.parse().expect("seed must be an integer"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "qtable.ghqt".into()));

    let (mdp, scenario) = (MdpConfig::default(), ScenarioConfig::default());
    let cfg = LearnerConfig { seed, ..LearnerConfig::default() };
    let run = train(&mdp, &scenario, &cfg)?;

    println!("episodes    mean return (per 1000)");
    for (k, chunk) in run.curve.chunks(1000).enumerate() {
        let m = chunk.iter().sum::<f64>() / chunk.len() as f64;
        let bar = "#".repeat(((m + 250.0) / 10.0).max(0.0) as usize);
        println!("{:>5}-{:<5} {m:>8.1} {bar}", k * 1000 + 1, (k + 1) * 1000);
    }

    let (oracle, _) = solve_value_iteration(&mdp, cfg.gamma, 1e-9)?;
    let agreement = oracle_agreement(&greedy_policy(&run.q), &oracle, &reachable_states(&scenario));
    println!(
        "\n{} checkpoints; greedy policy matches the exact optimum on {:.1}% of reachable states",
        run.checkpoints.len(),
        100.0 * agreement
    );
    save_qtable(&run.q, &out)?;
    println!("saved {}", out.display());
    Ok(())
}
