//! Particle filter over the wedge the operator intends to move toward, and the
//! base controller it drives.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wedge::{circular_distance, WedgeIndex, WEDGES};
use crate::world::{ControlCommand, HeadMotion};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// When false the filter is skipped entirely and the base never moves on its own.
    pub enabled: bool,
    pub particles: usize,
    /// Probability that a particle keeps its wedge during prediction.
    pub p_stay: f64,
    /// Per-wedge likelihood decay with circular distance from the focused wedge.
    pub likelihood: f64,
    /// Minimum weight fraction on one wedge for a decided estimate (inclusive).
    pub threshold: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { enabled: true, particles: 200, p_stay: 0.7, likelihood: 0.5, threshold: 0.7 }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particles < WEDGES {
            return Err(Error::Config(format!("need at least {WEDGES} particles, got {}", self.particles)));
        }
        for (name, p) in [("p_stay", self.p_stay), ("threshold", self.threshold)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} {p} not in [0, 1]")));
            }
        }
        if !(self.likelihood > 0.0 && self.likelihood <= 1.0) {
            return Err(Error::Config(format!("likelihood {} not in (0, 1]", self.likelihood)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub wedge: WedgeIndex,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub head_motion: HeadMotion,
    pub focused: WedgeIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntentEstimate {
    Undecided,
    Decided { wedge: WedgeIndex, density: f64 },
}

impl IntentEstimate {
    pub fn wedge(&self) -> Option<WedgeIndex> {
        match self {
            IntentEstimate::Decided { wedge, .. } => Some(*wedge),
            IntentEstimate::Undecided => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSet {
    particles: Vec<Particle>,
}

impl ParticleSet {
    /// `m` particles spread round-robin over the wedges with equal weight.
    pub fn new(m: usize) -> Result<Self> {
        if m < WEDGES {
            return Err(Error::Config(format!("need at least {WEDGES} particles, got {m}")));
        }
        let w = 1.0 / m as f64;
        let particles = (0..m).map(|i| Particle { wedge: WedgeIndex::wrapping(i as i64), weight: w }).collect();
        Ok(ParticleSet { particles })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.particles.iter().map(|p| p.weight).sum()
    }

    pub fn effective_sample_size(&self) -> f64 {
        1.0 / self.particles.iter().map(|p| p.weight * p.weight).sum::<f64>()
    }

    /// Weight mass on each wedge.
    pub fn density(&self) -> [f64; WEDGES] {
        let mut d = [0.0; WEDGES];
        for p in &self.particles {
            d[p.wedge.get()] += p.weight;
        }
        d
    }

    /// Relabels every particle by `k` wedges, as when the robot frame turns under them.
    pub fn rotate(&mut self, k: i64) {
        for p in &mut self.particles {
            p.wedge = p.wedge.shift(k);
        }
    }

    fn normalize(&mut self) {
        let total = self.total_weight();
        if total > 0.0 && total.is_finite() {
            for p in &mut self.particles {
                p.weight /= total;
            }
        } else {
            let w = 1.0 / self.particles.len() as f64;
            for p in &mut self.particles {
                p.weight = w;
            }
        }
    }
}

/// Motion update: each particle stays with `p_stay`, otherwise drifts one
/// wedge in the observed head-turn direction (either way if there was none).
///
/// Draws are stratified within each wedge: the particles sharing a wedge use
/// evenly spaced points offset by one uniform draw, so every particle keeps
/// the exact marginal transition while the per-wedge split has minimal
/// variance. Consumes one draw per wedge.
pub fn predict<R: Rng + ?Sized>(ps: &mut ParticleSet, motion: HeadMotion, cfg: &FilterConfig, rng: &mut R) {
    let mut members: [Vec<usize>; WEDGES] = Default::default();
    for (i, p) in ps.particles.iter().enumerate() {
        members[p.wedge.get()].push(i);
    }
    let drift = 1.0 - cfg.p_stay;
    for group in &members {
        let offset: f64 = rng.random();
        let n = group.len() as f64;
        for (j, &i) in group.iter().enumerate() {
            let u = (offset + j as f64) / n;
            if u < cfg.p_stay {
                continue;
            }
            let k = match motion {
                HeadMotion::Left => 1,
                HeadMotion::Right => -1,
                HeadMotion::None if u < cfg.p_stay + drift / 2.0 => 1,
                HeadMotion::None => -1,
            };
            let p = &mut ps.particles[i];
            p.wedge = p.wedge.shift(k);
        }
    }
}

/// Measurement update: weights scale by `likelihood^d` for circular distance
/// `d` to the focused wedge, then renormalize.
pub fn update_weights(ps: &mut ParticleSet, e: &Evidence, cfg: &FilterConfig) {
    for p in &mut ps.particles {
        let (d, _) = circular_distance(p.wedge, e.focused);
        p.weight *= cfg.likelihood.powi(d as i32);
    }
    ps.normalize();
}

/// Systematic resampling, only when the effective sample size drops below half the set.
/// Returns whether it resampled. Consumes one draw only when it does.
pub fn resample<R: Rng + ?Sized>(ps: &mut ParticleSet, rng: &mut R) -> bool {
    let m = ps.particles.len();
    if ps.effective_sample_size() >= m as f64 / 2.0 {
        return false;
    }
    let step = 1.0 / m as f64;
    let start: f64 = rng.random::<f64>() * step;
    let mut out = Vec::with_capacity(m);
    let mut cumulative = ps.particles[0].weight;
    let mut i = 0;
    for j in 0..m {
        let u = start + j as f64 * step;
        while u > cumulative && i + 1 < m {
            i += 1;
            cumulative += ps.particles[i].weight;
        }
        out.push(Particle { wedge: ps.particles[i].wedge, weight: step });
    }
    ps.particles = out;
    true
}

pub fn estimate_intent(ps: &ParticleSet, threshold: f64) -> IntentEstimate {
    let d = ps.density();
    let (best, &mass) =
        d.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0))).expect("eight wedges");
    // tolerate rounding from normalization at the boundary
    if mass + 1e-12 >= threshold {
        IntentEstimate::Decided { wedge: WedgeIndex::wrapping(best as i64), density: mass }
    } else {
        IntentEstimate::Undecided
    }
}

/// Turn toward the intended wedge, then drive; stay still while undecided.
pub fn controller(intent: &IntentEstimate) -> ControlCommand {
    match intent.wedge().map(|w| w.get()) {
        None => ControlCommand::Stop,
        Some(0) => ControlCommand::Forward,
        Some(4) => ControlCommand::Backward,
        Some(1..=3) => ControlCommand::RotateLeft,
        Some(_) => ControlCommand::RotateRight,
    }
}

/// A filter instance with its configuration.
#[derive(Debug, Clone)]
pub struct IntentFilter {
    pub cfg: FilterConfig,
    pub set: ParticleSet,
}

impl IntentFilter {
    pub fn new(cfg: FilterConfig) -> Result<Self> {
        cfg.validate()?;
        let set = ParticleSet::new(cfg.particles)?;
        Ok(IntentFilter { cfg, set })
    }

    /// One full cycle: predict, weigh, maybe resample, estimate.
    pub fn step<R: Rng + ?Sized>(&mut self, e: &Evidence, rng: &mut R) -> IntentEstimate {
        predict(&mut self.set, e.head_motion, &self.cfg, rng);
        update_weights(&mut self.set, e, &self.cfg);
        resample(&mut self.set, rng);
        self.estimate()
    }

    pub fn estimate(&self) -> IntentEstimate {
        estimate_intent(&self.set, self.cfg.threshold)
    }
}
