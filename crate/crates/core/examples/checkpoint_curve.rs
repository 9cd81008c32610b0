//! Scores every training checkpoint against the hand-coded baseline on one
//! shared evaluation set, for several learner seeds.
//!
//! ```text
//! cargo run --release --example checkpoint_curve [-- <seeds>]
//! ```

use wedgeguide::harness::{evaluate_checkpoints, EvalConfig};
use wedgeguide::{train, LearnerConfig, MdpConfig, ScenarioConfig};

fn main() -> wedgeguide::Result<()> {
    let seeds: u64 = std::env::args().nth(1).map_or(3, |s| s.parse().expect("seed count must be an integer"));
    let (mdp, scenario, eval) = (MdpConfig::default(), ScenarioConfig::default(), EvalConfig::default());
    let curves = (0..seeds)
        .map(|seed| {
            let run = train(&mdp, &scenario, &LearnerConfig { seed, ..LearnerConfig::default() })?;
            evaluate_checkpoints(&run.checkpoints, &scenario, &eval)
        })
        .collect::<wedgeguide::Result<Vec<_>>>()?;

    let fgs = curves[0].fgs_mean_return;
    println!("FGS reference {fgs:.2}; columns are learner seeds\n");
    print!("{:>8}", "episode");
    (0..seeds).for_each(|s| print!("{s:>10}"));
    println!();
    for i in (0..curves[0].points.len()).step_by(10).chain([curves[0].points.len() - 1]) {
        print!("{:>8}", curves[0].points[i].episode);
        for c in &curves {
            let v = c.points[i].mean_return;
            print!("{:>9.2}{}", v, if v > fgs { '+' } else { ' ' });
        }
        println!();
    }
    println!("\n+ marks checkpoints above the baseline");
    Ok(())
}
