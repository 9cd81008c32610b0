//! Solves the guidance MDP exactly and shows how the optimal action trades
//! rotation distance against clutter along the way.
//!
//! ```text
//! cargo run --release --example solve_oracle [-- <p_comply>]
//! ```

use wedgeguide::wedge::StateIndex;
use wedgeguide::{solve_value_iteration, EgoState, GuidanceAction, MdpConfig, WedgeValue};

fn state(target: usize, clutter: &[usize]) -> EgoState {
    let mut v = [WedgeValue::Empty; 8];
    for &k in clutter {
        v[k] = WedgeValue::Clutter;
    }
    v[target] = WedgeValue::Target;
    EgoState(v)
}

fn main() -> wedgeguide::Result<()> {
    let p_comply = std::env::args().nth(1).map_or(Ok(0.8), |s| s.parse()).expect("p_comply must be a number");
    let mdp = MdpConfig { p_comply, ..MdpConfig::default() };
    let (q, report) = solve_value_iteration(&mdp, 0.95, 1e-9)?;
    println!("p_comply {p_comply}: converged in {} sweeps (delta {:.1e})\n", report.iterations, report.final_delta);

    let cases: [(&str, EgoState); 6] = [
        ("target in focus", state(0, &[])),
        ("target one wedge left", state(1, &[])),
        ("target three wedges right", state(5, &[])),
        ("target opposite, open", state(4, &[])),
        ("target opposite, clutter on the left", state(4, &[1, 2, 3])),
        ("target two left through clutter", state(2, &[1, 7, 6])),
    ];
    println!("{:<38} {:>9} {:>9} {:>9}  best", "state", "confirm", "left", "right");
    for (name, s) in cases {
        let i: StateIndex = s.encode();
        let row = q.row(i);
        println!("{name:<38} {:>9.2} {:>9.2} {:>9.2}  {}", row[0], row[1], row[2], q.greedy(i));
    }
    let confirms = StateIndex::all().filter(|&i| q.greedy(i) == GuidanceAction::Confirm).count();
    println!("\n{confirms} of {} states prefer confirm", StateIndex::all().count());
    Ok(())
}
