use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Cell, World};

/// One of eight compass directions, counterclockwise from east (0 = E, 2 = N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Heading(u8);

impl Heading {
    pub const EAST: Heading = Heading(0);
    pub const ALL: [Heading; 8] =
        [Heading(0), Heading(1), Heading(2), Heading(3), Heading(4), Heading(5), Heading(6), Heading(7)];

    pub fn wrapping(i: i64) -> Self {
        Heading(i.rem_euclid(8) as u8)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn turned(self, k: i64) -> Self {
        Heading::wrapping(self.0 as i64 + k)
    }

    /// Grid offset `(drow, dcol)` of one step along this heading; rows grow southward.
    pub fn step(self) -> (i32, i32) {
        const STEPS: [(i32, i32); 8] = [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)];
        STEPS[self.0 as usize]
    }

    /// World-frame angle in radians.
    pub fn angle(self) -> f64 {
        self.0 as f64 * FRAC_PI_4
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 8] = ["E", "NE", "N", "NW", "W", "SW", "S", "SE"];
        f.write_str(NAMES[self.0 as usize])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RobotPose {
    pub cell: Cell,
    pub heading: Heading,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlCommand {
    Forward,
    Backward,
    RotateLeft,
    RotateRight,
    Stop,
}

impl fmt::Display for ControlCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControlCommand::Forward => "forward",
            ControlCommand::Backward => "backward",
            ControlCommand::RotateLeft => "rotate_left",
            ControlCommand::RotateRight => "rotate_right",
            ControlCommand::Stop => "stop",
        })
    }
}

/// Moves the robot one cell along `direction` (or against it), if the step is open.
pub fn translate(w: &World, pose: RobotPose, direction: Heading, backward: bool) -> RobotPose {
    let (mut dr, mut dc) = direction.step();
    if backward {
        dr = -dr;
        dc = -dc;
    }
    if w.can_step(pose.cell, dr, dc) {
        RobotPose { cell: pose.cell.offset(dr, dc), ..pose }
    } else {
        pose
    }
}

/// Applies one control command; blocked moves leave the pose unchanged.
pub fn step_robot(w: &World, pose: RobotPose, c: ControlCommand) -> RobotPose {
    match c {
        ControlCommand::Forward => translate(w, pose, pose.heading, false),
        ControlCommand::Backward => translate(w, pose, pose.heading, true),
        ControlCommand::RotateLeft => RobotPose { heading: pose.heading.turned(1), ..pose },
        ControlCommand::RotateRight => RobotPose { heading: pose.heading.turned(-1), ..pose },
        ControlCommand::Stop => pose,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::load_map;

    fn world() -> World {
        load_map(".....\n.#...\n.....\n", "target = cup\nobject = cup 2 4\n").unwrap()
    }

    #[test]
    fn forward_into_free_cell() {
        let w = world();
        let p = RobotPose { cell: Cell::new(0, 0), heading: Heading::EAST };
        assert_eq!(step_robot(&w, p, ControlCommand::Forward).cell, Cell::new(0, 1));
        assert_eq!(step_robot(&w, p, ControlCommand::Backward), p);
    }

    #[test]
    fn blocked_moves_stay_still() {
        let w = world();
        let p = RobotPose { cell: Cell::new(1, 0), heading: Heading::EAST };
        assert_eq!(step_robot(&w, p, ControlCommand::Forward), p);
        // the target object also blocks
        let p = RobotPose { cell: Cell::new(2, 3), heading: Heading::EAST };
        assert_eq!(step_robot(&w, p, ControlCommand::Forward), p);
        // diagonal past a wall corner
        let p = RobotPose { cell: Cell::new(0, 0), heading: Heading::wrapping(7) };
        assert_eq!(step_robot(&w, p, ControlCommand::Forward), p);
    }

    #[test]
    fn full_turn() {
        let w = world();
        let p = RobotPose { cell: Cell::new(0, 0), heading: Heading::wrapping(3) };
        let mut q = p;
        for _ in 0..8 {
            q = step_robot(&w, q, ControlCommand::RotateLeft);
        }
        assert_eq!(q, p);
        assert_eq!(step_robot(&w, p, ControlCommand::RotateRight).heading, Heading::wrapping(2));
    }

    #[test]
    fn never_enters_blocked_cell() {
        let w = world();
        let cmds = [
            ControlCommand::Forward,
            ControlCommand::Backward,
            ControlCommand::RotateLeft,
            ControlCommand::RotateRight,
            ControlCommand::Stop,
        ];
        for (cell, _) in w.passable_cells() {
            for h in Heading::ALL {
                for c in cmds {
                    let next = step_robot(&w, RobotPose { cell, heading: h }, c);
                    assert!(w.is_passable(next.cell));
                }
            }
        }
    }
}
