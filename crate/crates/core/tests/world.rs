//! Grid-world geometry: detection determinism, rotation, visibility, motion.

use wedgeguide::rng::rng_from_seed;
use wedgeguide::world::{
    bundled_map, detect, detect_clean, line_of_sight, step_robot, visible_objects, Cell, ControlCommand,
    DetectorConfig, Heading, RobotPose, World, BUNDLED_MAPS,
};
use wedgeguide::WedgeIndex;

fn maps() -> Vec<(&'static str, World)> {
    BUNDLED_MAPS.iter().map(|(name, _)| (*name, bundled_map(name).unwrap())).collect()
}

fn poses(w: &World) -> impl Iterator<Item = RobotPose> + '_ {
    w.passable_cells().flat_map(|(cell, _)| Heading::ALL.into_iter().map(move |heading| RobotPose { cell, heading }))
}

#[test]
fn noiseless_detection_ignores_the_rng() {
    let cfg = DetectorConfig::default().noiseless();
    for (name, w) in maps() {
        for p in poses(&w) {
            let a = detect(&w, p, &cfg, &mut rng_from_seed(1));
            let b = detect(&w, p, &cfg, &mut rng_from_seed(2));
            assert_eq!(a, b, "{name} {p:?}");
            assert_eq!(a, detect_clean(&w, p, cfg.range), "{name} {p:?}");
        }
    }
}

#[test]
fn turning_the_robot_permutes_the_detection() {
    for (name, w) in maps() {
        for p in poses(&w) {
            let base = detect_clean(&w, p, 6.0);
            for k in 1..8 {
                let turned = RobotPose { heading: p.heading.turned(k), ..p };
                let v = detect_clean(&w, turned, 6.0);
                for i in WedgeIndex::all() {
                    assert_eq!(v.get(i), base.get(i.shift(k)), "{name} {p:?} turn {k} wedge {i}");
                }
            }
        }
    }
}

#[test]
fn visibility_is_symmetric() {
    for (name, w) in maps() {
        let cells: Vec<_> = w.passable_cells().map(|(c, _)| c).collect();
        for &a in &cells {
            for &b in &cells {
                if (a.row - b.row).abs() <= 12 && (a.col - b.col).abs() <= 12 {
                    assert_eq!(line_of_sight(&w, a, b), line_of_sight(&w, b, a), "{name} {a:?} {b:?}");
                }
            }
        }
        // an object seen from the robot sees the robot's cell back, at the same range
        for p in poses(&w).filter(|p| p.heading == Heading::EAST) {
            for (i, _) in visible_objects(&w, p, 6.0) {
                assert!(line_of_sight(&w, w.objects[i].cell, p.cell), "{name} {p:?} object {i}");
            }
        }
    }
}

#[test]
fn robot_never_enters_a_blocked_cell() {
    let cmds = [
        ControlCommand::Forward,
        ControlCommand::Backward,
        ControlCommand::RotateLeft,
        ControlCommand::RotateRight,
        ControlCommand::Stop,
    ];
    for (name, w) in maps() {
        for p in poses(&w) {
            for c in cmds {
                let next = step_robot(&w, p, c);
                assert!(w.is_passable(next.cell), "{name} {p:?} {c}");
                assert!((next.cell.row - p.cell.row).abs() <= 1 && (next.cell.col - p.cell.col).abs() <= 1);
            }
        }
    }
}

#[test]
fn geodesic_distance_satisfies_bellman_optimality() {
    for (name, w) in maps() {
        let target = w.target().cell;
        let open = |c: Cell| w.in_bounds(c) && (c == target || w.is_passable(c));
        for (cell, d) in w.passable_cells() {
            let best = Heading::ALL
                .iter()
                .filter_map(|h| {
                    let (dr, dc) = h.step();
                    let next = cell.offset(dr, dc);
                    let diagonal = dr != 0 && dc != 0;
                    if !open(next) || (diagonal && !(open(cell.offset(dr, 0)) && open(cell.offset(0, dc)))) {
                        return None;
                    }
                    let step = if diagonal { std::f64::consts::SQRT_2 } else { 1.0 } * w.cell_size;
                    w.geodesic_distance(next).map(|n| n + step)
                })
                .min_by(f64::total_cmp);
            match (d, best) {
                (Some(d), Some(b)) => assert!((d - b).abs() < 1e-9, "{name} {cell:?}: {d} vs {b}"),
                (None, None) => {}
                other => panic!("{name} {cell:?}: {other:?}"),
            }
        }
    }
}
