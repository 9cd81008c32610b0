//! A sans-IO teleoperation session driven by a scripted operator.
//!
//! The operator is the simulated human of the trial loop: it confirms when told
//! to, follows left/right indicators with its configured probability and
//! otherwise picks a random move. After every command it pauses for one idle
//! cadence tick, on which the GHAL360 controller drives the base. Each line shows the command sent and the
//! state broadcast it produced; the first and last broadcasts are also printed
//! as raw JSON frames.
//!
//! cargo run -p wedgeguide-teleop --example scripted_session -- [map] [distance_m] [seed]

use std::sync::Arc;

use wedgeguide::harness::sample_start_poses;
use wedgeguide::policy::fgs_policy;
use wedgeguide::rng::{stream, SimRng, Stream};
use wedgeguide::world::{bundled_map, virtual_human_step, HumanConfig, HumanMove};
use wedgeguide::GuidanceAction;
use wedgeguide_teleop::{ClientCommand, ClientMessage, Phase, Reply, Session, SessionConfig, StateSnapshot};

fn operator(s: &StateSnapshot, human: &HumanConfig, rng: &mut SimRng) -> ClientCommand {
    if s.indicator == Some(GuidanceAction::Confirm) {
        return ClientCommand::Confirm;
    }
    match virtual_human_step(s.indicator, human, rng) {
        HumanMove::LookLeft => ClientCommand::LookLeft,
        HumanMove::LookRight => ClientCommand::LookRight,
        HumanMove::MoveForward => ClientCommand::MoveForward,
        HumanMove::MoveBackward => ClientCommand::MoveBackward,
    }
}

fn print_tick(input: &str, s: &StateSnapshot) {
    println!(
        "tick {:>3}  {:<12} focus {}  indicator {:<8} robot ({:>2},{:>2}) heading {}  base {}",
        s.tick,
        input,
        s.focus,
        s.indicator.map_or("-".into(), |a| format!("{a:?}")),
        s.robot.cell.row,
        s.robot.cell.col,
        s.robot.heading,
        s.command.map_or("-".into(), |c| c.to_string()),
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let map = args.next().unwrap_or_else(|| "office".into());
    let distance: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4.0);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let world = Arc::new(bundled_map(&map).ok_or(format!("unknown map {map}"))?);
    let start = sample_start_poses(&world, distance, 1, &mut stream(seed, Stream::StartPose))?[0];
    let cfg = SessionConfig { start: Some(start), ..Default::default() };
    let human = cfg.trial.human.clone();
    let mut rng = stream(seed, Stream::Human);
    let mut session = Session::new(0, world, Some(Arc::new(fgs_policy())), None, cfg, seed)?;
    println!("{}", session.hello().to_json());
    let first = session.snapshot();
    println!("{}", first.to_json());

    let mut state = first.state().cloned().ok_or("no state")?;
    let mut last = first;
    while state.phase == Phase::Running && state.tick < 300 {
        let cmd = operator(&state, &human, &mut rng);
        // commands travel as text frames, exactly as a browser would send them
        last = match session.handle_text(&ClientMessage::new(cmd.clone()).to_json()) {
            Reply::Send(m) => m,
            Reply::Close { code, reason } => return Err(format!("closed {code}: {reason}").into()),
        };
        state = last.state().cloned().ok_or("error reply")?;
        print_tick(&format!("{cmd:?}"), &state);
        if state.phase == Phase::Running {
            last = session.cadence().ok_or("episode ended")?;
            state = last.state().cloned().ok_or("error reply")?;
            print_tick("(idle)", &state);
        }
    }
    println!("{}", last.to_json());
    let trace = session.record();
    println!("phase {:?} after {} ticks; recorded {} trace ticks", state.phase, state.tick, trace.ticks.len());
    Ok(())
}
