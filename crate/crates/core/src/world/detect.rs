use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Cell, HumanState, RobotPose, World};
use crate::error::{Error, Result};
use crate::wedge::{wedge_of_bearing, WedgeIndex, WedgeValue, WedgeVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    /// Detection range in meters (cell-centre Euclidean distance).
    pub range: f64,
    /// Probability that a true detection is dropped.
    pub p_false_negative: f64,
    /// Probability that an empty wedge reports phantom clutter.
    pub p_false_positive: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { range: 6.0, p_false_negative: 0.05, p_false_positive: 0.05 }
    }
}

impl DetectorConfig {
    pub fn noiseless(&self) -> Self {
        DetectorConfig { p_false_negative: 0.0, p_false_positive: 0.0, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(Error::Config(format!("detector range {} must be positive", self.range)));
        }
        for p in [self.p_false_negative, self.p_false_positive] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("detector probability {p} not in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Straight-line visibility between two cells; walls strictly between them occlude.
///
/// The integer line is always walked from the lexicographically smaller
/// endpoint, so the relation is symmetric.
pub fn line_of_sight(w: &World, a: Cell, b: Cell) -> bool {
    let (from, to) = if a <= b { (a, b) } else { (b, a) };
    let (dr, dc) = ((to.row - from.row).abs(), (to.col - from.col).abs());
    let (sr, sc) = ((to.row - from.row).signum(), (to.col - from.col).signum());
    let mut err = dc - dr;
    let mut cur = from;
    while cur != to {
        let e2 = 2 * err;
        if e2 > -dr {
            err -= dr;
            cur.col += sc;
        }
        if e2 < dc {
            err += dc;
            cur.row += sr;
        }
        if cur != to && w.is_blocked(cur) {
            return false;
        }
    }
    true
}

/// Robot-frame wedge of every object within range and sight, as `(object index, wedge)`.
pub fn visible_objects<'a>(
    w: &'a World,
    pose: RobotPose,
    range: f64,
) -> impl Iterator<Item = (usize, WedgeIndex)> + 'a {
    w.objects.iter().enumerate().filter_map(move |(i, o)| {
        let dr = (o.cell.row - pose.cell.row) as f64;
        let dc = (o.cell.col - pose.cell.col) as f64;
        let dist = dr.hypot(dc) * w.cell_size;
        if dist == 0.0 || dist > range + 1e-9 || !line_of_sight(w, pose.cell, o.cell) {
            return None;
        }
        let bearing = (-dr).atan2(dc) - pose.heading.angle();
        wedge_of_bearing(bearing).ok().map(|k| (i, k))
    })
}

/// Simulated object detection around the robot.
///
/// Consumes exactly one draw per object and one per wedge on every call,
/// whether or not the draws matter, so detector streams stay aligned across
/// paired trials.
pub fn detect<R: Rng + ?Sized>(w: &World, pose: RobotPose, cfg: &DetectorConfig, rng: &mut R) -> WedgeVector {
    let mut seen: Vec<Option<WedgeIndex>> = vec![None; w.objects.len()];
    for (i, k) in visible_objects(w, pose, cfg.range) {
        seen[i] = Some(k);
    }
    let mut target = [false; 8];
    let mut clutter = [false; 8];
    for (i, slot) in seen.iter().enumerate() {
        let dropped = rng.random::<f64>() < cfg.p_false_negative;
        if let (Some(k), false) = (slot, dropped) {
            if i == w.target_index() {
                target[k.get()] = true;
            } else {
                clutter[k.get()] = true;
            }
        }
    }
    for k in 0..8 {
        let phantom = rng.random::<f64>() < cfg.p_false_positive;
        if phantom && !target[k] && !clutter[k] {
            clutter[k] = true;
        }
    }
    let mut v = WedgeVector::empty();
    for k in WedgeIndex::all() {
        v.set(k, WedgeValue::from_parts(target[k.get()], clutter[k.get()]));
    }
    v
}

/// Ground-truth detection with all noise disabled.
pub fn detect_clean(w: &World, pose: RobotPose, range: f64) -> WedgeVector {
    let mut target = [false; 8];
    let mut clutter = [false; 8];
    for (i, k) in visible_objects(w, pose, range) {
        if i == w.target_index() {
            target[k.get()] = true;
        } else {
            clutter[k.get()] = true;
        }
    }
    let mut v = WedgeVector::empty();
    for k in WedgeIndex::all() {
        v.set(k, WedgeValue::from_parts(target[k.get()], clutter[k.get()]));
    }
    v
}

/// Whether the noise-free detection puts the target in the operator's focused wedge.
pub fn target_in_focus(w: &World, pose: RobotPose, h: &HumanState, cfg: &DetectorConfig) -> bool {
    detect_clean(w, pose, cfg.range).get(h.focus).contains_target()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::world::{load_map, Heading};
    use proptest::prelude::*;

    fn open_world() -> World {
        let grid = ".........\n".repeat(9);
        load_map(&grid, "target = cup\nobject = cup 4 6\nobject = chair 2 4\n").unwrap()
    }

    fn pose(r: i32, c: i32, h: i64) -> RobotPose {
        RobotPose { cell: Cell::new(r, c), heading: Heading::wrapping(h) }
    }

    #[test]
    fn target_ahead_and_behind() {
        let w = open_world();
        let v = detect_clean(&w, pose(4, 4, 0), 6.0);
        assert_eq!(v.get(WedgeIndex::FORWARD), WedgeValue::Target);
        // chair is two rows north: 90 degrees left
        assert_eq!(v.get(WedgeIndex::wrapping(2)), WedgeValue::Clutter);
        let v = detect_clean(&w, pose(4, 4, 4), 6.0);
        assert_eq!(v.get(WedgeIndex::wrapping(4)), WedgeValue::Target);
    }

    #[test]
    fn out_of_range() {
        let w = open_world();
        assert_eq!(detect_clean(&w, pose(4, 0, 0), 2.0), WedgeVector::empty());
    }

    #[test]
    fn walls_occlude() {
        let w = load_map(".....\n..#..\n.....\n", "target = cup\nobject = cup 1 4\n").unwrap();
        assert!(!detect_clean(&w, pose(1, 0, 0), 6.0).has_target());
        assert!(detect_clean(&w, pose(0, 0, 0), 6.0).has_target());
    }

    #[test]
    fn noise_off_is_deterministic() {
        let w = open_world();
        let cfg = DetectorConfig::default().noiseless();
        let a = detect(&w, pose(4, 4, 1), &cfg, &mut rng_from_seed(1));
        let b = detect(&w, pose(4, 4, 1), &cfg, &mut rng_from_seed(2));
        assert_eq!(a, b);
        assert_eq!(a, detect_clean(&w, pose(4, 4, 1), cfg.range));
    }

    #[test]
    fn noise_never_invents_targets() {
        let w = open_world();
        let cfg = DetectorConfig { p_false_negative: 0.5, p_false_positive: 0.9, ..Default::default() };
        let mut rng = rng_from_seed(3);
        for _ in 0..2000 {
            let v = detect(&w, pose(4, 4, 0), &cfg, &mut rng);
            for k in v.target_wedges() {
                assert_eq!(k, WedgeIndex::FORWARD);
            }
        }
    }

    #[test]
    fn focus_check() {
        let w = open_world();
        let cfg = DetectorConfig::default();
        let mut h = HumanState::default();
        assert!(target_in_focus(&w, pose(4, 4, 0), &h, &cfg));
        h.focus = WedgeIndex::wrapping(4);
        assert!(!target_in_focus(&w, pose(4, 4, 0), &h, &cfg));
        assert!(!target_in_focus(&w, pose(4, 0, 0), &h, &DetectorConfig { range: 1.0, ..cfg }));
    }

    proptest! {
        #[test]
        fn rotation_permutes_detection(r in 0i32..9, c in 0i32..9, h in 0i64..8, k in 0i64..8) {
            let w = open_world();
            let p = pose(r, c, h);
            prop_assume!(w.is_passable(p.cell));
            let base = detect_clean(&w, p, 6.0);
            let turned = detect_clean(&w, RobotPose { heading: p.heading.turned(k), ..p }, 6.0);
            prop_assert_eq!(turned, base.rotated(k));
        }

        #[test]
        fn visibility_is_symmetric(
            walls in proptest::collection::vec(any::<bool>(), 49),
            a in (0i32..7, 0i32..7),
            b in (0i32..7, 0i32..7),
        ) {
            let grid: String = walls
                .chunks(7)
                .map(|row| row.iter().map(|&x| if x { '#' } else { '.' }).collect::<String>() + "\n")
                .collect();
            let free = walls.iter().position(|x| !x);
            prop_assume!(free.is_some());
            let f = free.unwrap();
            let meta = format!("target = cup\nobject = cup {} {}\n", f / 7, f % 7);
            let w = load_map(&grid, &meta).unwrap();
            let (a, b) = (Cell::new(a.0, a.1), Cell::new(b.0, b.1));
            prop_assert_eq!(line_of_sight(&w, a, b), line_of_sight(&w, b, a));
        }
    }
}
