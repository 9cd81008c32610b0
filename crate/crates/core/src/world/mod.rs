//! Grid world for the closed-loop simulation: map, robot, detector and virtual human.
//!
//! # Map files
//!
//! A map file is a UTF-8 text grid followed by a line holding only `---` and a
//! key-value metadata section:
//!
//! ```text
//! ##########
//! #R.......#
//! #........#
//! ##########
//! ---
//! cell_size = 0.5
//! target = laptop
//! object = laptop 2 7
//! object = chair 1 3
//! ```
//!
//! Grid characters: `#` blocked, `.` free, `R` free and the default robot
//! start (facing east). Rows must all have the same width. Metadata lines are
//! `key = value`; blank lines and lines starting with `;` are ignored. Keys:
//!
//! - `target = <name>`: the object to search for (required).
//! - `object = <name> <row> <col>`: one placement, zero-based; repeatable.
//!   Names may repeat, except the target's which must appear exactly once.
//! - `cell_size = <meters>`: optional, default 0.5.
//! - `name = <label>`: optional display name.
//!
//! Objects must sit on free cells. The robot never enters an object cell.

mod detect;
mod human;
mod robot;

pub use detect::{detect, detect_clean, line_of_sight, target_in_focus, visible_objects, DetectorConfig};
pub use human::{apply_human_move, virtual_human_step, HeadMotion, HumanConfig, HumanMove, HumanState};
pub use robot::{step_robot, translate, ControlCommand, Heading, RobotPose};

use std::collections::BinaryHeap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CELL_SIZE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: i32,
    pub col: i32,
}

impl Cell {
    pub fn new(row: i32, col: i32) -> Self {
        Cell { row, col }
    }

    pub fn offset(self, dr: i32, dc: i32) -> Self {
        Cell { row: self.row + dr, col: self.col + dc }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectPlacement {
    pub name: String,
    pub cell: Cell,
}

#[derive(Debug, Clone)]
pub struct World {
    pub name: String,
    rows: usize,
    cols: usize,
    blocked: Vec<bool>,
    occupied: Vec<bool>,
    pub cell_size: f64,
    pub objects: Vec<ObjectPlacement>,
    pub target_name: String,
    target_index: usize,
    pub default_start: Option<Cell>,
    /// Geodesic distance in meters from every cell to the target; `None` if unreachable.
    distances: Vec<Option<f64>>,
}

impl World {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.row >= 0 && c.col >= 0 && (c.row as usize) < self.rows && (c.col as usize) < self.cols
    }

    fn idx(&self, c: Cell) -> usize {
        c.row as usize * self.cols + c.col as usize
    }

    /// Wall cell (out-of-bounds counts as blocked).
    pub fn is_blocked(&self, c: Cell) -> bool {
        !self.in_bounds(c) || self.blocked[self.idx(c)]
    }

    /// Cell the robot may occupy.
    pub fn is_passable(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.blocked[self.idx(c)] && !self.occupied[self.idx(c)]
    }

    pub fn target(&self) -> &ObjectPlacement {
        &self.objects[self.target_index]
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    /// Whether the robot can move one step from `from` by `(dr, dc)`.
    ///
    /// Diagonal steps also need both orthogonal neighbours open, so the robot
    /// never squeezes between two diagonally touching walls. Symmetric in its
    /// endpoints.
    pub fn can_step(&self, from: Cell, dr: i32, dc: i32) -> bool {
        self.can_step_with(from, dr, dc, |c| self.is_passable(c))
    }

    fn can_step_with(&self, from: Cell, dr: i32, dc: i32, open: impl Fn(Cell) -> bool) -> bool {
        let to = from.offset(dr, dc);
        if !open(to) {
            return false;
        }
        if dr != 0 && dc != 0 {
            return open(from.offset(dr, 0)) && open(from.offset(0, dc));
        }
        true
    }

    /// Shortest free-cell path length to the target, in meters.
    pub fn geodesic_distance(&self, c: Cell) -> Option<f64> {
        if !self.in_bounds(c) {
            return None;
        }
        self.distances[self.idx(c)]
    }

    /// All passable cells with their geodesic distance to the target.
    pub fn passable_cells(&self) -> impl Iterator<Item = (Cell, Option<f64>)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (0..self.cols).filter_map(move |c| {
                let cell = Cell::new(r as i32, c as i32);
                self.is_passable(cell).then(|| (cell, self.geodesic_distance(cell)))
            })
        })
    }

    /// Largest finite geodesic distance from a passable cell.
    pub fn max_distance(&self) -> f64 {
        self.passable_cells().filter_map(|(_, d)| d).fold(0.0, f64::max)
    }

    fn compute_distances(&mut self) {
        let target = self.target().cell;
        let open = |c: Cell| c == target || self.is_passable(c);
        let mut dist: Vec<Option<f64>> = vec![None; self.rows * self.cols];
        let mut heap = BinaryHeap::new();
        dist[self.idx(target)] = Some(0.0);
        heap.push(Frontier { cost: 0.0, cell: target });
        while let Some(Frontier { cost, cell }) = heap.pop() {
            if dist[self.idx(cell)].is_some_and(|d| cost > d) {
                continue;
            }
            for h in Heading::ALL {
                let (dr, dc) = h.step();
                if !self.can_step_with(cell, dr, dc, open) {
                    continue;
                }
                let next = cell.offset(dr, dc);
                let step = if dr != 0 && dc != 0 { std::f64::consts::SQRT_2 } else { 1.0 };
                let nc = cost + step * self.cell_size;
                let slot = &mut dist[self.idx(next)];
                if slot.is_none_or(|d| nc < d - 1e-12) {
                    *slot = Some(nc);
                    heap.push(Frontier { cost: nc, cell: next });
                }
            }
        }
        self.distances = dist;
    }

    /// The grid as text, without metadata.
    pub fn grid_text(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| if self.blocked[r * self.cols + c] { '#' } else { '.' }).collect())
            .collect()
    }
}

#[derive(PartialEq)]
struct Frontier {
    cost: f64,
    cell: Cell,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Parses a map grid and its object metadata.
pub fn load_map(grid_text: &str, metadata: &str) -> Result<World> {
    let lines: Vec<&str> = grid_text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(Error::Map { line: 1, msg: "empty grid".into() });
    }
    let cols = lines[0].chars().count();
    let mut blocked = Vec::with_capacity(lines.len() * cols);
    let mut default_start = None;
    for (r, line) in lines.iter().enumerate() {
        if line.chars().count() != cols {
            return Err(Error::Map {
                line: r + 1,
                msg: format!("row has {} cells, expected {cols}", line.chars().count()),
            });
        }
        for (c, ch) in line.chars().enumerate() {
            match ch {
                '#' => blocked.push(true),
                '.' => blocked.push(false),
                'R' => {
                    if default_start.is_some() {
                        return Err(Error::Map { line: r + 1, msg: "more than one 'R'".into() });
                    }
                    default_start = Some(Cell::new(r as i32, c as i32));
                    blocked.push(false);
                }
                other => {
                    return Err(Error::Map {
                        line: r + 1,
                        msg: format!("unexpected character {other:?} in column {c}"),
                    })
                }
            }
        }
    }
    let rows = lines.len();

    let mut cell_size = DEFAULT_CELL_SIZE;
    let mut target_name = None;
    let mut name = String::from("unnamed");
    let mut objects = Vec::new();
    for (i, raw) in metadata.lines().enumerate() {
        let line_no = rows + 2 + i;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Map { line: line_no, msg: format!("expected `key = value`, got {line:?}") })?;
        match key {
            "target" => target_name = Some(value.to_string()),
            "name" => name = value.to_string(),
            "cell_size" => {
                cell_size = value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v > 0.0)
                    .ok_or_else(|| Error::Map { line: line_no, msg: format!("bad cell_size {value:?}") })?;
            }
            "object" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let parsed = match parts.as_slice() {
                    [n, r, c] => r.parse::<i32>().ok().zip(c.parse::<i32>().ok()).map(|(r, c)| (n, r, c)),
                    _ => None,
                };
                let (obj, r, c) = parsed.ok_or_else(|| Error::Map {
                    line: line_no,
                    msg: format!("expected `object = <name> <row> <col>`, got {value:?}"),
                })?;
                objects.push(ObjectPlacement { name: obj.to_string(), cell: Cell::new(r, c) });
            }
            other => return Err(Error::Map { line: line_no, msg: format!("unknown key {other:?}") }),
        }
    }
    let target_name = target_name.ok_or_else(|| Error::Map { line: rows + 1, msg: "missing `target`".into() })?;

    let mut occupied = vec![false; rows * cols];
    for o in &objects {
        let c = o.cell;
        let inside = c.row >= 0 && c.col >= 0 && (c.row as usize) < rows && (c.col as usize) < cols;
        if !inside {
            return Err(Error::Map {
                line: rows + 1,
                msg: format!("object `{}` at ({}, {}) is outside the grid", o.name, c.row, c.col),
            });
        }
        let i = c.row as usize * cols + c.col as usize;
        if blocked[i] {
            return Err(Error::BlockedPlacement { name: o.name.clone(), row: c.row as usize, col: c.col as usize });
        }
        occupied[i] = true;
    }
    let target_hits: Vec<usize> =
        objects.iter().enumerate().filter(|(_, o)| o.name == target_name).map(|(i, _)| i).collect();
    if target_hits.len() != 1 {
        return Err(Error::TargetCount(target_name, target_hits.len()));
    }
    if let Some(s) = default_start {
        if occupied[s.row as usize * cols + s.col as usize] {
            return Err(Error::Map { line: s.row as usize + 1, msg: "robot start holds an object".into() });
        }
    }

    let mut world = World {
        name,
        rows,
        cols,
        blocked,
        occupied,
        cell_size,
        objects,
        target_name,
        target_index: target_hits[0],
        default_start,
        distances: Vec::new(),
    };
    world.compute_distances();
    Ok(world)
}

/// Parses a complete map document (grid, `---`, metadata).
pub fn parse_map_file(text: &str) -> Result<World> {
    let mut grid = String::new();
    let mut meta = String::new();
    let mut in_meta = false;
    for line in text.lines() {
        if !in_meta && line.trim() == "---" {
            in_meta = true;
            continue;
        }
        let buf = if in_meta { &mut meta } else { &mut grid };
        buf.push_str(line);
        buf.push('\n');
    }
    if !in_meta {
        return Err(Error::Map { line: text.lines().count() + 1, msg: "missing `---` separator".into() });
    }
    load_map(&grid, &meta)
}

pub fn load_map_file(path: &Path) -> Result<World> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_map_file(&text)
}

/// The maps shipped with the crate, as `(file name, contents)`.
pub const BUNDLED_MAPS: [(&str, &str); 3] = [
    ("home.map", include_str!("../../maps/home.map")),
    ("office.map", include_str!("../../maps/office.map")),
    ("corridor.map", include_str!("../../maps/corridor.map")),
];

pub fn bundled_map(name: &str) -> Option<World> {
    BUNDLED_MAPS
        .iter()
        .find(|(n, _)| *n == name || n.trim_end_matches(".map") == name)
        .map(|(_, text)| parse_map_file(text).expect("bundled maps are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "...\n...\n...\n";

    #[test]
    fn small_valid_world() {
        let w = load_map(SMALL, "target = cup\nobject = cup 1 1\n").unwrap();
        assert_eq!(w.rows(), 3);
        assert_eq!(w.target().cell, Cell::new(1, 1));
        assert_eq!(w.geodesic_distance(Cell::new(1, 2)), Some(0.5));
        let diag = w.geodesic_distance(Cell::new(0, 0)).unwrap();
        assert!((diag - 0.5 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn object_on_wall_is_rejected() {
        let err = load_map(".#.\n...\n", "target = cup\nobject = cup 0 1\n").unwrap_err();
        match err {
            Error::BlockedPlacement { row, col, .. } => assert_eq!((row, col), (0, 1)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn target_must_be_unique() {
        let meta = "target = cup\nobject = cup 0 0\nobject = cup 2 2\n";
        assert!(matches!(load_map(SMALL, meta), Err(Error::TargetCount(_, 2))));
        assert!(matches!(load_map(SMALL, "target = cup\n"), Err(Error::TargetCount(_, 0))));
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = load_map("...\n..\n", "target = cup\nobject = cup 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Map { line: 2, .. }), "{err}");
    }

    #[test]
    fn bad_metadata_rejected() {
        assert!(load_map(SMALL, "target cup\n").is_err());
        assert!(load_map(SMALL, "target = cup\nobject = cup one 1\n").is_err());
        assert!(load_map(SMALL, "target = cup\nobject = cup 5 5\n").is_err());
        assert!(load_map(SMALL, "object = cup 1 1\n").is_err());
    }

    #[test]
    fn walls_lengthen_geodesic_distance() {
        let grid = ".....\n.###.\n.....\n";
        let w = load_map(grid, "target = cup\nobject = cup 0 2\n").unwrap();
        // straight below the wall, must walk around it
        let d = w.geodesic_distance(Cell::new(2, 2)).unwrap();
        assert!(d > 1.0 + 1e-9, "{d}");
    }

    #[test]
    fn walled_off_cells_unreachable() {
        let grid = "..#..\n..#..\n..#..\n";
        let w = load_map(grid, "target = cup\nobject = cup 1 0\n").unwrap();
        assert_eq!(w.geodesic_distance(Cell::new(1, 4)), None);
    }

    #[test]
    fn full_file_parses() {
        let text = "R..\n...\n---\ntarget = cup\nobject = cup 1 2\n";
        let w = parse_map_file(text).unwrap();
        assert_eq!(w.default_start, Some(Cell::new(0, 0)));
        assert!(parse_map_file("R..\n").is_err());
    }

    #[test]
    fn bundled_maps_load() {
        for (name, _) in BUNDLED_MAPS {
            let w = bundled_map(name).unwrap();
            assert!(w.max_distance() >= 12.5, "{name}: {}", w.max_distance());
            assert!(w.default_start.is_some());
        }
    }
}
