use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::learning::LearnerConfig;
use crate::mdp::{MdpConfig, ScenarioConfig};
use crate::systems::{SystemKind, TrialConfig};
use crate::world::{bundled_map, load_map_file, World};

/// Environment variable that overrides `base_seed`.
pub const SEED_ENV: &str = "GHAL_SEED";

/// How checkpoint policies are scored in the abstract simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Episodes in the shared evaluation set.
    pub episodes: u32,
    /// Seed of the evaluation set.
    pub seed: u64,
    /// Dynamics used for scoring; compliance defaults to the virtual human's.
    pub mdp: MdpConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { episodes: 5000, seed: 17, mdp: MdpConfig { p_comply: 0.95, ..MdpConfig::default() } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base_seed: u64,
    /// Bundled map names (`home`, `office`, `corridor`) or map file paths.
    pub maps: Vec<String>,
    pub systems: Vec<SystemKind>,
    pub distances_m: Vec<f64>,
    /// Paired trials per (map, distance) in each run.
    pub trials_per_distance: usize,
    pub runs: usize,
    /// Q-table file for the learning systems; when absent each run trains its own.
    pub policy: Option<PathBuf>,
    pub mdp: MdpConfig,
    pub scenario: ScenarioConfig,
    pub learner: LearnerConfig,
    pub trial: TrialConfig,
    pub evaluation: EvalConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            base_seed: 2020,
            maps: vec!["home".into(), "office".into(), "corridor".into()],
            systems: SystemKind::ALL.to_vec(),
            distances_m: vec![4.0, 8.0, 12.0],
            trials_per_distance: 100,
            runs: 5,
            policy: None,
            mdp: MdpConfig::default(),
            scenario: ScenarioConfig::default(),
            learner: LearnerConfig::default(),
            trial: TrialConfig { record_trace: false, ..TrialConfig::default() },
            evaluation: EvalConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file and applies the seed environment override.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.apply_env()?;
        Ok(cfg)
    }

    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.base_seed =
                v.trim().parse().map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.maps.is_empty() || self.systems.is_empty() || self.distances_m.is_empty() {
            return Err(Error::Config("maps, systems and distances_m must be non-empty".into()));
        }
        if let Some(d) = self.distances_m.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::Config(format!("distance {d} must be positive")));
        }
        if self.trials_per_distance == 0 || self.runs == 0 {
            return Err(Error::Config("trials_per_distance and runs must be positive".into()));
        }
        self.mdp.validate()?;
        self.scenario.validate()?;
        self.learner.validate()?;
        self.trial.validate()?;
        self.evaluation.mdp.validate()
    }

    pub fn load_maps(&self) -> Result<Vec<(String, World)>> {
        self.maps.iter().map(|m| Ok((map_label(m), resolve_map(m)?))).collect()
    }

    /// Hex SHA-256 over the semantic content: every field plus the text of each map.
    pub fn hash(&self) -> Result<String> {
        let mut canonical = self.clone();
        canonical.trial.record_trace = false;
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&canonical)?);
        for m in &self.maps {
            h.update(map_text(m)?.as_bytes());
        }
        if let Some(p) = &self.policy {
            h.update(fs::read(p).map_err(|e| Error::io(p, e))?);
        }
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }
}

fn map_label(m: &str) -> String {
    Path::new(m).file_stem().and_then(|s| s.to_str()).unwrap_or(m).to_string()
}

fn map_text(m: &str) -> Result<String> {
    if let Some((_, text)) = crate::world::BUNDLED_MAPS.iter().find(|(n, _)| n.trim_end_matches(".map") == m) {
        return Ok(text.to_string());
    }
    fs::read_to_string(m).map_err(|e| Error::io(m, e))
}

/// A bundled map by name, otherwise a map file.
pub fn resolve_map(m: &str) -> Result<World> {
    match bundled_map(m) {
        Some(w) if !m.contains('/') => Ok(w),
        _ => load_map_file(Path::new(m)),
    }
}
