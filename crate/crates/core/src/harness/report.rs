use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::stats::sig6;
use crate::error::{Error, Result};
use crate::systems::SystemKind;

/// Header of the completion-time CSV.
pub const TIME_HEADER: &str = "map,system,distance_m,mean_time_s,std_time_s";
/// Header of the accuracy CSV.
pub const ACCURACY_HEADER: &str = "map,system,mean_accuracy,std_accuracy";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeCell {
    pub map: String,
    pub system: SystemKind,
    pub distance_m: f64,
    pub mean_time_s: f64,
    pub std_time_s: f64,
    /// Mean completion time of each run.
    pub run_means: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCell {
    pub map: String,
    pub system: SystemKind,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub run_values: Vec<f64>,
}

/// Accuracy over all maps and distances, per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledAccuracy {
    pub system: SystemKind,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub run_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config_hash: String,
    pub base_seed: u64,
    pub trials_per_distance: usize,
    pub runs: usize,
    pub times: Vec<TimeCell>,
    pub accuracy: Vec<AccuracyCell>,
    pub pooled_accuracy: Vec<PooledAccuracy>,
    /// Per-run training curves, averaged per checkpoint batch; empty when a policy file was used.
    pub learning_curves: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ExperimentReport {
    pub fn time(&self, map: &str, system: SystemKind, distance_m: f64) -> Option<&TimeCell> {
        self.times.iter().find(|c| c.map == map && c.system == system && (c.distance_m - distance_m).abs() < 1e-9)
    }

    pub fn accuracy(&self, map: &str, system: SystemKind) -> Option<&AccuracyCell> {
        self.accuracy.iter().find(|c| c.map == map && c.system == system)
    }

    pub fn pooled(&self, system: SystemKind) -> Option<&PooledAccuracy> {
        self.pooled_accuracy.iter().find(|c| c.system == system)
    }

    pub fn maps(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.times {
            if !out.contains(&c.map) {
                out.push(c.map.clone());
            }
        }
        out
    }

    fn provenance(&self) -> String {
        format!("# config_hash={} base_seed={}\n", self.config_hash, self.base_seed)
    }

    pub fn times_csv(&self) -> String {
        let mut s = format!("{TIME_HEADER}\n");
        for c in &self.times {
            s += &format!(
                "{},{},{},{},{}\n",
                c.map,
                c.system,
                sig6(c.distance_m),
                sig6(c.mean_time_s),
                sig6(c.std_time_s)
            );
        }
        s + &self.provenance()
    }

    pub fn accuracy_csv(&self) -> String {
        let mut s = format!("{ACCURACY_HEADER}\n");
        for c in &self.accuracy {
            s += &format!("{},{},{},{}\n", c.map, c.system, sig6(c.mean_accuracy), sig6(c.std_accuracy));
        }
        for c in &self.pooled_accuracy {
            s += &format!("all,{},{},{}\n", c.system, sig6(c.mean_accuracy), sig6(c.std_accuracy));
        }
        s + &self.provenance()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes the report into `dir`; returns the files written.
    ///
    /// CSV output is `times.csv` and `accuracy.csv`, each ending with a
    /// `# config_hash=... base_seed=...` line; JSON output is `report.json`.
    pub fn emit(&self, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files: Vec<(&str, String)> = match format {
            ReportFormat::Csv => vec![("times.csv", self.times_csv()), ("accuracy.csv", self.accuracy_csv())],
            ReportFormat::Json => vec![("report.json", self.to_json()?)],
        };
        files
            .into_iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}
