use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::poses::sample_start_poses;
use super::report::{AccuracyCell, ExperimentReport, PooledAccuracy, TimeCell};
use super::stats::{mean, std_dev};
use crate::error::Result;
use crate::learning::{train, LearnerConfig};
use crate::policy::{greedy_policy, GuidancePolicy};
use crate::qtable::load_qtable;
use crate::rng::{mix, stream, Stream};
use crate::systems::{paired_seeds, run_trial, SystemKind};
use crate::world::RobotPose;

const POLICY_SALT: u64 = 0x706f_6c69_6379;
const CELL_SALT: u64 = 0x6365_6c6c;

/// The guidance policy used by run `run`, with its training curve if it was trained.
pub fn run_policy(cfg: &ExperimentConfig, run: usize) -> Result<(GuidancePolicy, Option<Vec<f64>>)> {
    if let Some(path) = &cfg.policy {
        return Ok((greedy_policy(&load_qtable(path)?), None));
    }
    let learner = LearnerConfig { seed: mix(cfg.base_seed ^ POLICY_SALT, run as u64), ..cfg.learner.clone() };
    let trained = train(&cfg.mdp, &cfg.scenario, &learner)?;
    let batch = learner.checkpoint_every.max(1) as usize;
    let curve = trained.curve.chunks(batch).map(mean).collect();
    Ok((greedy_policy(&trained.q), Some(curve)))
}

/// Seed shared by every system for one (run, map, distance) block; start
/// poses come from its `StartPose` stream and trial `k` runs with
/// `paired_seeds(n, seed)[k]`.
pub fn block_seed(base: u64, run: usize, map: usize, distance: usize) -> u64 {
    mix(mix(mix(base ^ CELL_SALT, run as u64), map as u64), distance as u64)
}

struct Block {
    run: usize,
    map: usize,
    distance: usize,
    starts: Vec<RobotPose>,
    seeds: Vec<u64>,
}

/// Runs the full factorial and aggregates it into a report.
///
/// Trials are distributed across threads, but every seed is fixed by its
/// indices and results are reduced in index order, so the report depends
/// only on the configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let maps = cfg.load_maps()?;
    let n = cfg.trials_per_distance;

    let trained: Vec<_> = if cfg.systems.iter().any(|k| k.needs_policy()) {
        (0..cfg.runs).into_par_iter().map(|r| run_policy(cfg, r)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut blocks = Vec::new();
    for run in 0..cfg.runs {
        for (mi, (_, world)) in maps.iter().enumerate() {
            for (di, &d) in cfg.distances_m.iter().enumerate() {
                let seed = block_seed(cfg.base_seed, run, mi, di);
                let starts = sample_start_poses(world, d, n, &mut stream(seed, Stream::StartPose))?;
                blocks.push(Block { run, map: mi, distance: di, starts, seeds: paired_seeds(n, seed) });
            }
        }
    }

    let systems = &cfg.systems;
    let jobs: Vec<(usize, usize, usize)> =
        (0..blocks.len()).flat_map(|b| (0..systems.len()).flat_map(move |s| (0..n).map(move |t| (b, s, t)))).collect();
    let outcomes: Vec<(f64, bool)> = jobs
        .par_iter()
        .map(|&(b, s, t)| {
            let block = &blocks[b];
            let kind = systems[s];
            let policy = kind.needs_policy().then(|| &trained[block.run].0);
            let r = run_trial(kind, &maps[block.map].1, policy, &cfg.trial, block.starts[t], block.seeds[t])?;
            Ok((r.elapsed_s, r.correct))
        })
        .collect::<Result<_>>()?;

    // run_times[map][system][distance][run], run_correct[map][system][run] = (hits, total)
    let (nm, ns, nd, nr) = (maps.len(), systems.len(), cfg.distances_m.len(), cfg.runs);
    let mut run_times = vec![vec![vec![vec![0.0; nr]; nd]; ns]; nm];
    let mut run_hits = vec![vec![vec![0usize; nr]; ns]; nm];
    for (j, &(b, s, _)) in jobs.iter().enumerate() {
        let block = &blocks[b];
        let (elapsed, correct) = outcomes[j];
        run_times[block.map][s][block.distance][block.run] += elapsed / n as f64;
        run_hits[block.map][s][block.run] += correct as usize;
    }

    let mut times = Vec::new();
    let mut accuracy = Vec::new();
    for (mi, (label, _)) in maps.iter().enumerate() {
        for (si, &kind) in systems.iter().enumerate() {
            for (di, &d) in cfg.distances_m.iter().enumerate() {
                let rm = &run_times[mi][si][di];
                times.push(TimeCell {
                    map: label.clone(),
                    system: kind,
                    distance_m: d,
                    mean_time_s: mean(rm),
                    std_time_s: std_dev(rm),
                    run_means: rm.clone(),
                });
            }
            let per_run: Vec<f64> = run_hits[mi][si].iter().map(|&h| h as f64 / (n * nd) as f64).collect();
            accuracy.push(AccuracyCell {
                map: label.clone(),
                system: kind,
                mean_accuracy: mean(&per_run),
                std_accuracy: std_dev(&per_run),
                run_values: per_run,
            });
        }
    }
    let pooled_accuracy = systems
        .iter()
        .enumerate()
        .map(|(si, &kind)| {
            let per_run: Vec<f64> = (0..nr)
                .map(|r| (0..nm).map(|mi| run_hits[mi][si][r]).sum::<usize>() as f64 / (n * nd * nm) as f64)
                .collect();
            PooledAccuracy {
                system: kind,
                mean_accuracy: mean(&per_run),
                std_accuracy: std_dev(&per_run),
                run_values: per_run,
            }
        })
        .collect();

    Ok(ExperimentReport {
        config_hash: cfg.hash()?,
        base_seed: cfg.base_seed,
        trials_per_distance: n,
        runs: nr,
        times,
        accuracy,
        pooled_accuracy,
        learning_curves: trained.into_iter().filter_map(|(_, c)| c).collect(),
    })
}

/// Systems in the order the report lists them.
pub fn report_systems(report: &ExperimentReport) -> Vec<SystemKind> {
    let mut out: Vec<SystemKind> = Vec::new();
    for c in &report.accuracy {
        if !out.contains(&c.system) {
            out.push(c.system);
        }
    }
    out
}
