//! The eight-wedge scene abstraction.
//!
//! A 360° view is split into eight 45° wedges, indexed counterclockwise in
//! the robot frame with wedge 0 centred on the forward axis. Every wedge is
//! summarised by one [`WedgeValue`]. An [`EgoState`] is the same vector
//! rotated so that index 0 is the wedge the operator is looking at; it is the
//! state of the guidance MDP and packs into a base-4 index in `[0, 4^8)`.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of wedges around the robot.
pub const WEDGES: usize = 8;

/// Number of distinct egocentric states, `4^8`.
pub const NUM_STATES: usize = 1 << (2 * WEDGES);

/// Content class of one wedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum WedgeValue {
    /// Nothing detected.
    #[default]
    Empty = 0,
    /// One or more non-target objects.
    Clutter = 1,
    /// The target and nothing else.
    Target = 2,
    /// The target together with clutter.
    TargetClutter = 3,
}

impl WedgeValue {
    pub const ALL: [WedgeValue; 4] =
        [WedgeValue::Empty, WedgeValue::Clutter, WedgeValue::Target, WedgeValue::TargetClutter];

    pub fn from_parts(target: bool, clutter: bool) -> Self {
        match (target, clutter) {
            (false, false) => WedgeValue::Empty,
            (false, true) => WedgeValue::Clutter,
            (true, false) => WedgeValue::Target,
            (true, true) => WedgeValue::TargetClutter,
        }
    }

    pub fn contains_target(self) -> bool {
        matches!(self, WedgeValue::Target | WedgeValue::TargetClutter)
    }

    pub fn contains_clutter(self) -> bool {
        matches!(self, WedgeValue::Clutter | WedgeValue::TargetClutter)
    }

    pub fn digit(self) -> u8 {
        self as u8
    }

    pub fn from_digit(d: u8) -> Option<Self> {
        WedgeValue::ALL.get(d as usize).copied()
    }

    /// Short label `w0`..`w3`.
    pub fn label(self) -> &'static str {
        match self {
            WedgeValue::Empty => "w0",
            WedgeValue::Clutter => "w1",
            WedgeValue::Target => "w2",
            WedgeValue::TargetClutter => "w3",
        }
    }
}

/// Index of a wedge; arithmetic wraps modulo 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WedgeIndex(u8);

impl WedgeIndex {
    pub const FORWARD: WedgeIndex = WedgeIndex(0);

    /// Wraps any integer onto `[0, 8)`.
    pub fn wrapping(i: i64) -> Self {
        WedgeIndex(i.rem_euclid(WEDGES as i64) as u8)
    }

    pub fn new(i: u8) -> Result<Self> {
        if (i as usize) < WEDGES {
            Ok(WedgeIndex(i))
        } else {
            Err(Error::OutOfRange(format!("wedge index {i} not in [0, 8)")))
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Rotates by `k` wedges counterclockwise (negative is clockwise).
    pub fn shift(self, k: i64) -> Self {
        Self::wrapping(self.0 as i64 + k)
    }

    pub fn all() -> impl Iterator<Item = WedgeIndex> {
        (0..WEDGES as u8).map(WedgeIndex)
    }
}

impl fmt::Display for WedgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Robot-frame wedge vector; index 0 is the forward wedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct WedgeVector(pub [WedgeValue; WEDGES]);

impl WedgeVector {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn get(&self, i: WedgeIndex) -> WedgeValue {
        self.0[i.get()]
    }

    pub fn set(&mut self, i: WedgeIndex, v: WedgeValue) {
        self.0[i.get()] = v;
    }

    /// Wedges holding the target.
    pub fn target_wedges(&self) -> impl Iterator<Item = WedgeIndex> + '_ {
        WedgeIndex::all().filter(|&i| self.get(i).contains_target())
    }

    pub fn has_target(&self) -> bool {
        self.0.iter().any(|v| v.contains_target())
    }

    /// Vector whose wedge `i` holds this vector's wedge `i + k`.
    pub fn rotated(&self, k: i64) -> Self {
        let mut out = [WedgeValue::Empty; WEDGES];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.0[WedgeIndex::wrapping(i as i64 + k).get()];
        }
        WedgeVector(out)
    }
}

impl fmt::Display for WedgeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "{}", v.digit())?;
        }
        Ok(())
    }
}

/// Wedge vector relative to the operator's focus: index 0 is the focused wedge,
/// index `k` is `k` wedges counterclockwise from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EgoState(pub [WedgeValue; WEDGES]);

/// Packed [`EgoState`], in `[0, 65536)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateIndex(u16);

impl StateIndex {
    pub fn new(i: usize) -> Result<Self> {
        if i < NUM_STATES {
            Ok(StateIndex(i as u16))
        } else {
            Err(Error::OutOfRange(format!("state index {i} not in [0, {NUM_STATES})")))
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = StateIndex> {
        (0..NUM_STATES).map(|i| StateIndex(i as u16))
    }
}

impl EgoState {
    pub fn focused(&self) -> WedgeValue {
        self.0[0]
    }

    pub fn get(&self, k: usize) -> WedgeValue {
        self.0[k % WEDGES]
    }

    /// Base-4 packing, ego index 0 is the least significant digit.
    pub fn encode(&self) -> StateIndex {
        let idx = self.0.iter().rev().fold(0u16, |acc, v| (acc << 2) | v.digit() as u16);
        StateIndex(idx)
    }

    pub fn decode(i: StateIndex) -> Self {
        let mut out = [WedgeValue::Empty; WEDGES];
        let mut rest = i.0;
        for slot in out.iter_mut() {
            *slot = WedgeValue::ALL[(rest & 3) as usize];
            rest >>= 2;
        }
        EgoState(out)
    }

    /// State seen after the focus moves `k` wedges counterclockwise.
    pub fn shift_focus(&self, k: i64) -> Self {
        let mut out = [WedgeValue::Empty; WEDGES];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.0[WedgeIndex::wrapping(i as i64 + k).get()];
        }
        EgoState(out)
    }

    /// Left-right reflection about the focused wedge.
    pub fn mirrored(&self) -> Self {
        let mut out = [WedgeValue::Empty; WEDGES];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.0[WedgeIndex::wrapping(-(i as i64)).get()];
        }
        EgoState(out)
    }

    pub fn target_offsets(&self) -> impl Iterator<Item = WedgeIndex> + '_ {
        WedgeIndex::all().filter(|&i| self.0[i.get()].contains_target())
    }

    pub fn has_target(&self) -> bool {
        self.0.iter().any(|v| v.contains_target())
    }
}

impl fmt::Display for EgoState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "{}", v.digit())?;
        }
        Ok(())
    }
}

pub fn encode_state(s: &EgoState) -> StateIndex {
    s.encode()
}

pub fn decode_state(i: usize) -> Result<EgoState> {
    Ok(EgoState::decode(StateIndex::new(i)?))
}

/// `result[k] = v[(focus + k) mod 8]`.
pub fn to_egocentric(v: &WedgeVector, focus: WedgeIndex) -> EgoState {
    EgoState(v.rotated(focus.get() as i64).0)
}

/// Guidance actions. Declaration order is the greedy tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuidanceAction {
    Confirm = 0,
    /// Look one wedge counterclockwise (focus index +1).
    Left = 1,
    /// Look one wedge clockwise (focus index -1).
    Right = 2,
}

impl GuidanceAction {
    pub const ALL: [GuidanceAction; 3] = [GuidanceAction::Confirm, GuidanceAction::Left, GuidanceAction::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Focus shift produced by a compliant response.
    pub fn focus_delta(self) -> i64 {
        match self {
            GuidanceAction::Confirm => 0,
            GuidanceAction::Left => 1,
            GuidanceAction::Right => -1,
        }
    }

    pub fn is_indicator(self) -> bool {
        !matches!(self, GuidanceAction::Confirm)
    }

    pub fn mirrored(self) -> Self {
        match self {
            GuidanceAction::Confirm => GuidanceAction::Confirm,
            GuidanceAction::Left => GuidanceAction::Right,
            GuidanceAction::Right => GuidanceAction::Left,
        }
    }
}

impl fmt::Display for GuidanceAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuidanceAction::Confirm => "confirm",
            GuidanceAction::Left => "left",
            GuidanceAction::Right => "right",
        })
    }
}

/// Rotation sense of the shorter arc between two wedges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShorterDirection {
    /// Counterclockwise (index increasing).
    Left,
    /// Clockwise (index decreasing).
    Right,
    /// Antipodal; both senses are four steps.
    Tie,
    /// Same wedge.
    None,
}

/// Shortest arc from `from` to `to`, with the direction to rotate `from`.
pub fn circular_distance(from: WedgeIndex, to: WedgeIndex) -> (u8, ShorterDirection) {
    let ccw = (to.get() + WEDGES - from.get()) % WEDGES;
    let cw = (WEDGES - ccw) % WEDGES;
    let d = ccw.min(cw) as u8;
    let dir = match ccw.cmp(&cw) {
        _ if ccw == 0 => ShorterDirection::None,
        std::cmp::Ordering::Less => ShorterDirection::Left,
        std::cmp::Ordering::Greater => ShorterDirection::Right,
        std::cmp::Ordering::Equal => ShorterDirection::Tie,
    };
    (d, dir)
}

/// Wedge containing a robot-frame bearing (radians, counterclockwise from forward).
pub fn wedge_of_bearing(angle: f64) -> Result<WedgeIndex> {
    if !angle.is_finite() {
        return Err(Error::NonFinite("bearing"));
    }
    let shifted = (angle + FRAC_PI_8).rem_euclid(TAU);
    let w = (shifted / FRAC_PI_4).floor() as i64;
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    Ok(WedgeIndex::wrapping(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ego(digits: [u8; 8]) -> EgoState {
        EgoState(digits.map(|d| WedgeValue::from_digit(d).unwrap()))
    }

    #[test]
    fn encode_examples() {
        assert_eq!(ego([0; 8]).encode().get(), 0);
        assert_eq!(ego([2, 0, 0, 0, 0, 0, 0, 0]).encode().get(), 2);
        // 3 * 4^7
        assert_eq!(ego([0, 0, 0, 0, 0, 0, 0, 3]).encode().get(), 49152);
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_state(0).unwrap(), ego([0; 8]));
        assert_eq!(decode_state(65535).unwrap(), ego([3; 8]));
        assert_eq!(decode_state(2).unwrap(), ego([2, 0, 0, 0, 0, 0, 0, 0]));
        assert!(decode_state(65536).is_err());
    }

    #[test]
    fn egocentric_examples() {
        let mut v = WedgeVector::empty();
        v.set(WedgeIndex::wrapping(3), WedgeValue::Target);
        assert_eq!(to_egocentric(&v, WedgeIndex::FORWARD).0, v.0);
        assert_eq!(to_egocentric(&v, WedgeIndex::wrapping(3)).focused(), WedgeValue::Target);

        let mut v = WedgeVector::empty();
        v.set(WedgeIndex::wrapping(1), WedgeValue::Target);
        let e = to_egocentric(&v, WedgeIndex::wrapping(7));
        let found: Vec<_> = e.target_offsets().collect();
        assert_eq!(found, vec![WedgeIndex::wrapping(2)]);
    }

    #[test]
    fn circular_distance_examples() {
        let w = WedgeIndex::wrapping;
        assert_eq!(circular_distance(w(0), w(0)), (0, ShorterDirection::None));
        // ccw 0->3 is 3 steps, cw is 5
        assert_eq!(circular_distance(w(0), w(3)), (3, ShorterDirection::Left));
        assert_eq!(circular_distance(w(0), w(5)), (3, ShorterDirection::Right));
        assert_eq!(circular_distance(w(0), w(4)), (4, ShorterDirection::Tie));
    }

    #[test]
    fn bearing_examples() {
        assert_eq!(wedge_of_bearing(0.0).unwrap().get(), 0);
        assert_eq!(wedge_of_bearing(PI).unwrap().get(), 4);
        assert_eq!(wedge_of_bearing(TAU + 0.1).unwrap(), wedge_of_bearing(0.1).unwrap());
        assert_eq!(wedge_of_bearing(-0.3).unwrap().get(), 0);
        assert_eq!(wedge_of_bearing(PI / 2.0).unwrap().get(), 2);
        assert_eq!(wedge_of_bearing(-PI / 2.0).unwrap().get(), 6);
        assert_eq!(wedge_of_bearing(-1e-18).unwrap().get(), 0);
        assert!(wedge_of_bearing(f64::NAN).is_err());
        assert!(wedge_of_bearing(f64::INFINITY).is_err());
    }

    #[test]
    fn action_order_is_tie_break_order() {
        assert!(GuidanceAction::Confirm < GuidanceAction::Left);
        assert!(GuidanceAction::Left < GuidanceAction::Right);
    }

    fn arb_vector() -> impl Strategy<Value = WedgeVector> {
        proptest::array::uniform8(0u8..4).prop_map(|d| WedgeVector(d.map(|x| WedgeValue::from_digit(x).unwrap())))
    }

    proptest! {
        #[test]
        fn egocentric_rotation_law(v in arb_vector(), f in 0u8..8) {
            let e = to_egocentric(&v, WedgeIndex::wrapping(f as i64));
            for k in 0..8 {
                prop_assert_eq!(e.0[k], v.0[(f as usize + k) % 8]);
            }
        }

        #[test]
        fn egocentric_composes(v in arb_vector(), f1 in 0i64..8, f2 in 0i64..8) {
            let lhs = to_egocentric(&v, WedgeIndex::wrapping(f1 + f2));
            let rhs = to_egocentric(&v.rotated(f1), WedgeIndex::wrapping(f2));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn circular_distance_symmetric(a in 0i64..8, b in 0i64..8) {
            let (d1, _) = circular_distance(WedgeIndex::wrapping(a), WedgeIndex::wrapping(b));
            let (d2, _) = circular_distance(WedgeIndex::wrapping(b), WedgeIndex::wrapping(a));
            prop_assert_eq!(d1, d2);
            prop_assert!(d1 <= 4);
        }

        #[test]
        fn shorter_direction_reaches_target(a in 0i64..8, b in 0i64..8) {
            let (from, to) = (WedgeIndex::wrapping(a), WedgeIndex::wrapping(b));
            let (d, dir) = circular_distance(from, to);
            let step = match dir {
                ShorterDirection::Left | ShorterDirection::Tie => 1,
                ShorterDirection::Right => -1,
                ShorterDirection::None => 0,
            };
            prop_assert_eq!(from.shift(step * d as i64), to);
        }

        #[test]
        fn bearing_periodic(angle in -20.0f64..20.0, k in -3i32..3) {
            let a = wedge_of_bearing(angle).unwrap();
            let b = wedge_of_bearing(angle + k as f64 * TAU).unwrap();
            // periodicity holds away from wedge boundaries, where float error can flip
            let frac = ((angle + FRAC_PI_8).rem_euclid(TAU) / FRAC_PI_4).fract();
            if frac > 1e-9 && frac < 1.0 - 1e-9 {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn bearing_interior_maps_to_wedge(w in 0i64..8, t in 0.01f64..0.99) {
            let angle = (w as f64) * FRAC_PI_4 - FRAC_PI_8 + t * FRAC_PI_4;
            prop_assert_eq!(wedge_of_bearing(angle).unwrap().get() as i64, w);
        }
    }

    #[test]
    fn codec_roundtrip_exhaustive() {
        for i in StateIndex::all() {
            assert_eq!(EgoState::decode(i).encode(), i);
        }
    }
}
