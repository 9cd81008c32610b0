//! The wedge state model: a world-frame detection, the operator's egocentric
//! view of it, its state index, and what each guidance source suggests.
//!
//! ```text
//! cargo run --example wedge_states
//! ```

use wedgeguide::policy::{fgs_action, greedy_policy};
use wedgeguide::wedge::to_egocentric;
use wedgeguide::{solve_value_iteration, EgoState, MdpConfig, WedgeIndex, WedgeValue, WedgeVector};

fn main() -> wedgeguide::Result<()> {
    // target behind-left of the robot, clutter ahead and to the right
    let mut detection = WedgeVector::empty();
    detection.set(WedgeIndex::new(3)?, WedgeValue::Target);
    detection.set(WedgeIndex::new(0)?, WedgeValue::Clutter);
    detection.set(WedgeIndex::new(7)?, WedgeValue::Clutter);
    detection.set(WedgeIndex::new(2)?, WedgeValue::Clutter);

    let (q, _) = solve_value_iteration(&MdpConfig::default(), 0.95, 1e-9)?;
    let oracle = greedy_policy(&q);

    println!("detection (robot frame, wedge 0 = ahead, counterclockwise): {detection}");
    println!("{:>5} {:>10} {:>7} {:>8} {:>8}", "focus", "ego view", "index", "FGS", "oracle");
    for focus in WedgeIndex::all() {
        let ego: EgoState = to_egocentric(&detection, focus);
        let i = ego.encode();
        let fgs = fgs_action(&ego).map_or("-".to_string(), |a| a.to_string());
        println!("{:>5} {:>10} {:>7} {:>8} {:>8}", focus.get(), ego, i.get(), fgs, oracle.action(i));
    }
    println!("\ndigits: 0 empty, 1 clutter, 2 target, 3 target with clutter");
    Ok(())
}
