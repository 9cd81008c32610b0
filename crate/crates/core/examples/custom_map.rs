//! Builds a world from map text, inspects its geometry and detections, and
//! compares the systems on it.
//!
//! ```text
//! cargo run --release --example custom_map
//! ```

use wedgeguide::harness::sample_start_poses;
use wedgeguide::policy::greedy_policy;
use wedgeguide::rng::rng_from_seed;
use wedgeguide::systems::paired_seeds;
use wedgeguide::world::{detect_clean, parse_map_file, Heading, RobotPose};
use wedgeguide::{run_trial, solve_value_iteration, MdpConfig, SystemKind, TrialConfig};

const STUDIO: &str = "\
##########################
#......#.................#
#......#.................#
#.R....#......#####......#
#.............#...#......#
#......#......#...#......#
##########....#####......#
#........................#
#........................#
##########################
---
name = studio
cell_size = 0.5
target = keys
object = keys 8 22
object = sofa 2 12
object = lamp 4 4
object = shelf 7 9
object = plant 1 20
";

fn main() -> wedgeguide::Result<()> {
    let world = parse_map_file(STUDIO)?;
    let start = RobotPose { cell: world.default_start.expect("map has an R"), heading: Heading::EAST };
    let t = world.target();
    println!("{} x {} cells, target '{}' at ({}, {})", world.rows(), world.cols(), t.name, t.cell.row, t.cell.col);
    println!("R is {:.2} m from the target along free cells", world.geodesic_distance(start.cell).unwrap_or(f64::NAN));
    println!("farthest reachable cell: {:.2} m", world.max_distance());
    println!("what the robot sees from R (wedge digits): {}", detect_clean(&world, start, 6.0));

    let policy = greedy_policy(&solve_value_iteration(&MdpConfig::default(), 0.95, 1e-9)?.0);
    let cfg = TrialConfig { record_trace: false, ..TrialConfig::default() };
    let n = 200;
    let starts = sample_start_poses(&world, 8.0, n, &mut rng_from_seed(1))?;
    let seeds = paired_seeds(n, 1);
    println!("\n{n} paired trials from 8 m");
    for kind in SystemKind::ALL {
        let p = kind.needs_policy().then_some(&policy);
        let (mut time, mut correct) = (0.0, 0);
        for (&s, &start) in seeds.iter().zip(&starts) {
            let r = run_trial(kind, &world, p, &cfg, start, s)?;
            time += r.elapsed_s / n as f64;
            correct += r.correct as usize;
        }
        println!("{:>8}: mean time {time:>6.1} s, accuracy {:.3}", kind.name(), correct as f64 / n as f64);
    }
    Ok(())
}
