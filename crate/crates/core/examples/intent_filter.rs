//! Feeds the intent filter a scripted operator (look around, then settle
//! on one wedge) and prints the belief and the base command each step.
//!
//! ```text
//! cargo run --example intent_filter
//! ```

use wedgeguide::intent::{controller, Evidence, FilterConfig, IntentFilter};
use wedgeguide::rng::rng_from_seed;
use wedgeguide::world::HeadMotion;
use wedgeguide::WedgeIndex;

fn main() -> wedgeguide::Result<()> {
    let mut filter = IntentFilter::new(FilterConfig::default())?;
    let mut rng = rng_from_seed(0);
    // glance left twice, back right once, then hold on wedge 1
    let script = [
        (HeadMotion::Left, 1),
        (HeadMotion::Left, 2),
        (HeadMotion::Right, 1),
        (HeadMotion::None, 1),
        (HeadMotion::None, 1),
        (HeadMotion::None, 1),
        (HeadMotion::None, 1),
    ];
    println!(
        "{:>4} {:>6} {:>5}  {:<47} {:>10} command",
        "step", "motion", "focus", "density per wedge 0..7", "estimate"
    );
    for (t, (motion, focus)) in script.into_iter().enumerate() {
        let e = Evidence { head_motion: motion, focused: WedgeIndex::new(focus)? };
        let estimate = filter.step(&e, &mut rng);
        let density: Vec<String> = filter.set.density().iter().map(|d| format!("{d:.2}")).collect();
        let shown = estimate.wedge().map_or("undecided".to_string(), |w| format!("wedge {w}"));
        println!(
            "{t:>4} {:>6} {focus:>5}  {:<47} {shown:>10} {}",
            format!("{motion:?}").to_lowercase(),
            density.join(" "),
            controller(&estimate)
        );
    }
    Ok(())
}
