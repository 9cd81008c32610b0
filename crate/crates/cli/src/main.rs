//! `wedgeguide`: command-line front end over the `wedgeguide` library.
//!
//! Every verb reads one TOML config (`--config`, defaults when omitted),
//! applies `GHAL_SEED` and command-line overrides, and writes its outputs
//! into `--out`. Identical inputs give byte-identical files.

use std::error::Error;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use wedgeguide::harness::stats::sig6;
use wedgeguide::harness::{
    evaluate_checkpoints, resolve_map, run_experiment, sample_start_poses, ExperimentConfig, ReportFormat,
};
use wedgeguide::policy::{fgs_policy, greedy_policy};
use wedgeguide::rng::{stream, Stream};
use wedgeguide::trace::{render_trace, Trace};
use wedgeguide::world::{Heading, RobotPose};
use wedgeguide::{
    load_qtable, oracle_agreement, reachable_states, run_trial, save_qtable, solve_value_iteration, train,
    LearnerConfig, SystemKind,
};
use wedgeguide_teleop::{ServeConfig, SessionConfig};

type CliResult<T = ()> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "wedgeguide", version, about = "Attention guidance for 360-degree telepresence target search")]
struct Cli {
    /// TOML config; every field is optional and defaults are documented in configs/desk.toml.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Train a guidance Q-table in the abstract simulation.
    Train {
        #[arg(long)]
        out: PathBuf,
        /// Learner seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        episodes: Option<u32>,
    },
    /// Solve the abstract MDP exactly by value iteration.
    Solve {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Also report how often this Q-table's greedy policy agrees with the oracle.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Train, then score every checkpoint and the hand-coded baseline on one evaluation set.
    EvalCheckpoints {
        #[arg(long)]
        out: PathBuf,
        /// Learner seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the full comparison and write the report.
    Experiment {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Base seed (after GHAL_SEED).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Q-table for the learning systems instead of training per run.
        #[arg(long)]
        policy: Option<PathBuf>,
    },
    /// Run one trial and write its trace.
    Trial {
        #[arg(long)]
        out: PathBuf,
        /// Bundled map name or map file.
        #[arg(long, default_value = "home")]
        map: String,
        #[arg(long, default_value = "GHAL360")]
        system: SystemKind,
        /// Start at a random pose this many meters from the target.
        #[arg(long, default_value_t = 8.0)]
        distance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Q-table for RLGS and GHAL360; trained from the config when absent.
        #[arg(long)]
        policy: Option<PathBuf>,
    },
    /// Render a trace as text frames.
    Replay {
        trace: PathBuf,
        /// Map the trace was recorded on; defaults to the bundled map named in the header.
        #[arg(long)]
        map: Option<String>,
        /// Write the frames here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve live operator sessions on ws://<host>:<port>/session.
    Serve {
        #[arg(long)]
        map: String,
        /// Q-table for RLGS and GHAL360 sessions; FGS guidance when absent.
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value = "GHAL360")]
        system: SystemKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep learning from operator responses.
        #[arg(long)]
        online: bool,
        /// Write each closed session's trace here.
        #[arg(long)]
        record_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

fn load_config(path: Option<&Path>) -> CliResult<ExperimentConfig> {
    Ok(match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => {
            let mut c = ExperimentConfig::default();
            c.apply_env()?;
            c
        }
    })
}

fn write(path: &Path, body: impl AsRef<[u8]>) -> CliResult {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, body)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn learner(cfg: &ExperimentConfig, seed: Option<u64>, episodes: Option<u32>) -> LearnerConfig {
    let mut l = cfg.learner.clone();
    l.seed = seed.unwrap_or(l.seed);
    l.episodes = episodes.unwrap_or(l.episodes);
    l
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> CliResult {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.verb {
        Verb::Train { out, seed, episodes } => {
            let l = learner(&cfg, seed, episodes);
            let run = train(&cfg.mdp, &cfg.scenario, &l)?;
            fs::create_dir_all(&out)?;
            save_qtable(&run.q, &out.join("qtable.ghqt"))?;
            println!("wrote {}", out.join("qtable.ghqt").display());
            let mut csv = String::from("episode,return\n");
            for (i, r) in run.curve.iter().enumerate() {
                csv += &format!("{},{}\n", i + 1, sig6(*r));
            }
            write(&out.join("training_curve.csv"), csv)?;
        }
        Verb::Solve { out, gamma, tol, compare } => {
            let (q, report) = solve_value_iteration(&cfg.mdp, gamma, tol)?;
            fs::create_dir_all(&out)?;
            save_qtable(&q, &out.join("oracle.ghqt"))?;
            println!("wrote {}", out.join("oracle.ghqt").display());
            let states = reachable_states(&cfg.scenario);
            let mut summary = format!(
                "iterations = {}\nfinal_delta = {:e}\nreachable_states = {}\nfgs_agreement = {}\n",
                report.iterations,
                report.final_delta,
                states.len(),
                sig6(oracle_agreement(&fgs_policy(), &q, &states))
            );
            if let Some(p) = compare {
                let agreement = oracle_agreement(&greedy_policy(&load_qtable(&p)?), &q, &states);
                summary += &format!("compared_agreement = {}\n", sig6(agreement));
            }
            print!("{summary}");
            write(&out.join("solve.toml"), summary)?;
        }
        Verb::EvalCheckpoints { out, seed } => {
            let l = learner(&cfg, seed, None);
            let run = train(&cfg.mdp, &cfg.scenario, &l)?;
            let curve = evaluate_checkpoints(&run.checkpoints, &cfg.scenario, &cfg.evaluation)?;
            let mut csv = String::from("checkpoint,episode,mean_return,fgs_mean_return\n");
            for (i, p) in curve.points.iter().enumerate() {
                csv += &format!("{},{},{},{}\n", i + 1, p.episode, sig6(p.mean_return), sig6(curve.fgs_mean_return));
            }
            write(&out.join("checkpoints.csv"), csv)?;
        }
        Verb::Experiment { out, format, seed, runs, trials, policy } => {
            let mut cfg = cfg;
            cfg.base_seed = seed.unwrap_or(cfg.base_seed);
            cfg.runs = runs.unwrap_or(cfg.runs);
            cfg.trials_per_distance = trials.unwrap_or(cfg.trials_per_distance);
            cfg.policy = policy.or(cfg.policy);
            let report = run_experiment(&cfg)?;
            let formats: &[ReportFormat] = match format {
                Format::Csv => &[ReportFormat::Csv],
                Format::Json => &[ReportFormat::Json],
                Format::Both => &[ReportFormat::Csv, ReportFormat::Json],
            };
            for f in formats {
                for p in report.emit(&out, *f)? {
                    println!("wrote {}", p.display());
                }
            }
            write(&out.join("config.toml"), cfg.to_toml())?;
        }
        Verb::Trial { out, map, system, distance, seed, policy } => {
            let world = resolve_map(&map)?;
            let policy = match (system.needs_policy(), policy) {
                (false, _) => None,
                (true, Some(p)) => Some(greedy_policy(&load_qtable(&p)?)),
                (true, None) => Some(greedy_policy(&train(&cfg.mdp, &cfg.scenario, &cfg.learner)?.q)),
            };
            let start = sample_start_poses(&world, distance, 1, &mut stream(seed, Stream::StartPose))?[0];
            let trial = wedgeguide::TrialConfig { record_trace: true, ..cfg.trial.clone() };
            let r = run_trial(system, &world, policy.as_ref(), &trial, start, seed)?;
            println!(
                "{} {} after {} ticks ({} s)",
                system,
                if r.success { "found the target" } else { "gave up" },
                r.ticks,
                r.elapsed_s
            );
            write(&out, Trace::from_trial(&r, &map).to_jsonl()?)?;
        }
        Verb::Replay { trace, map, out } => {
            let trace = Trace::parse(&fs::read_to_string(&trace)?)?;
            let world = resolve_map(map.as_deref().unwrap_or(&trace.header.map))?;
            let frames = render_trace(&world, &trace);
            match out {
                Some(p) => write(&p, frames)?,
                None => print!("{frames}"),
            }
        }
        Verb::Serve { map, policy, port, host, system, seed, online, record_dir } => {
            let world = resolve_map(&map)?;
            let q = policy.as_deref().map(load_qtable).transpose()?;
            let policy = Arc::new(match &q {
                Some(q) => greedy_policy(q),
                None => fgs_policy(),
            });
            let start = world.default_start.map(|cell| RobotPose { cell, heading: Heading::EAST });
            let start = start.or_else(|| {
                world
                    .passable_cells()
                    .find(|(_, d)| d.is_some())
                    .map(|(cell, _)| RobotPose { cell, heading: Heading::EAST })
            });
            let session = SessionConfig {
                system,
                trial: cfg.trial.clone(),
                online,
                learner: cfg.learner.clone(),
                mdp: cfg.mdp.clone(),
                start,
                ..SessionConfig::default()
            };
            let q = q.or_else(|| online.then(wedgeguide::QTable::zeros));
            let addr: SocketAddr = format!("{host}:{port}").parse()?;
            let serve = ServeConfig { world: Arc::new(world), policy: Some(policy), q, session, seed, record_dir };
            println!("serving {system} sessions on ws://{addr}/session");
            tokio::runtime::Runtime::new()?.block_on(wedgeguide_teleop::serve(addr, serve))?;
        }
    }
    Ok(())
}
