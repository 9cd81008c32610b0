//! Runs one paired trial per system from the same start and prints the
//! GHAL360 trial frame by frame.
//!
//! ```text
//! cargo run --release --example trial_replay [-- <map> <distance_m> <seed>]
//! ```

use wedgeguide::harness::sample_start_poses;
use wedgeguide::policy::greedy_policy;
use wedgeguide::rng::{stream, Stream};
use wedgeguide::trace::{render_trace, Trace};
use wedgeguide::world::bundled_map;
use wedgeguide::{run_trial, solve_value_iteration, MdpConfig, SystemKind, TrialConfig};

fn main() -> wedgeguide::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let map = args.first().map_or("office", String::as_str);
    let distance: f64 = args.get(1).map_or(6.0, |s| s.parse().expect("distance must be a number"));
    let seed: u64 = args.get(2).map_or(4, |s| s.parse().expect("seed must be an integer"));

    let world = bundled_map(map).expect("bundled map: home, office or corridor");
    let policy = greedy_policy(&solve_value_iteration(&MdpConfig::default(), 0.95, 1e-9)?.0);
    let start = sample_start_poses(&world, distance, 1, &mut stream(seed, Stream::StartPose))?[0];
    let cfg = TrialConfig::default();

    let mut ghal = None;
    for kind in SystemKind::ALL {
        let r = run_trial(kind, &world, kind.needs_policy().then_some(&policy), &cfg, start, seed)?;
        println!("{:>8}: {:>5} s, success {}, correct {}", kind.name(), r.elapsed_s, r.success, r.correct);
        if kind == SystemKind::Ghal360 {
            ghal = Some(r);
        }
    }
    let trace = Trace::from_trial(&ghal.expect("GHAL360 ran"), map);
    println!("\n{}", render_trace(&world, &trace));
    Ok(())
}
