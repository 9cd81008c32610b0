//! Runs the desk-scale comparison (3 maps x 5 systems x {4, 8, 12} m x 100
//! paired trials x 5 runs) and prints the completion-time and accuracy tables.
//!
//! ```text
//! cargo run --release --example desk_experiment [-- <config.toml>]
//! ```

use std::path::Path;

use wedgeguide::harness::{run_experiment, ExperimentConfig};

fn main() -> wedgeguide::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(p) => ExperimentConfig::load(Path::new(&p))?,
        None => {
            let mut c = ExperimentConfig::default();
            c.apply_env()?;
            c
        }
    };
    let started = std::time::Instant::now();
    let report = run_experiment(&cfg)?;

    println!("mean completion time, seconds (std over {} runs)", report.runs);
    for map in report.maps() {
        println!("\n{map}");
        print!("{:>8}", "dist");
        for k in &cfg.systems {
            print!("{:>18}", k.name());
        }
        println!();
        for &d in &cfg.distances_m {
            print!("{:>7}m", d);
            for &k in &cfg.systems {
                let c = report.time(&map, k, d).expect("cell");
                print!("{:>11.1} ±{:>5.1}", c.mean_time_s, c.std_time_s);
            }
            println!();
        }
    }
    println!("\naccuracy pooled over maps");
    for p in &report.pooled_accuracy {
        println!("{:>8} {:.3} ± {:.3}", p.system.name(), p.mean_accuracy, p.std_accuracy);
    }
    eprintln!("\n{:.1?} elapsed, config {}", started.elapsed(), &report.config_hash[..12]);
    Ok(())
}
