//! Sans-IO session state machine: text in, messages out.

use std::sync::Arc;

use serde_json::Value;
use wedgeguide::intent::{controller, Evidence, IntentEstimate, IntentFilter};
use wedgeguide::learning::LearnerConfig;
use wedgeguide::mdp::MdpConfig;
use wedgeguide::policy::{Guidance, OnlineGuidance};
use wedgeguide::rng::{mix, stream, SimRng, Stream};
use wedgeguide::systems::{indicator_for, MoveFrame, TickRecord};
use wedgeguide::trace::{Trace, TraceHeader, TraceOutcome, TRACE_VERSION};
use wedgeguide::wedge::to_egocentric;
use wedgeguide::world::{
    apply_human_move, detect, step_robot, target_in_focus, translate, visible_objects, ControlCommand, HeadMotion,
    Heading, HumanMove, HumanState, RobotPose, World,
};
use wedgeguide::{EgoState, GuidanceAction, GuidancePolicy, QTable, SystemKind, TrialConfig, WedgeIndex, WedgeVector};

use crate::protocol::*;

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Core(#[from] wedgeguide::Error),
    #[error("{0} sessions need a policy")]
    MissingPolicy(SystemKind),
    #[error("no start cell: the map has no `R` and none was given")]
    NoStart,
    #[error("trace does not belong to this session configuration: {0}")]
    TraceMismatch(String),
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    /// System the operator works with; GHAL360 adds intent-driven base motion.
    pub system: SystemKind,
    /// Detector, intent filter, move frame and tick length.
    pub trial: TrialConfig,
    /// Keep updating the Q-table from operator responses to indicators.
    pub online: bool,
    pub learner: LearnerConfig,
    pub mdp: MdpConfig,
    /// Start pose; defaults to the map's `R` cell facing east.
    pub start: Option<RobotPose>,
    /// Idle period after which the controller ticks.
    pub cadence_ms: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            system: SystemKind::Ghal360,
            trial: TrialConfig::default(),
            online: false,
            learner: LearnerConfig::default(),
            mdp: MdpConfig::default(),
            start: None,
            cadence_ms: 2000,
        }
    }
}

/// Outcome of one client frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Reply {
    Send(ServerMessage),
    Close { code: u16, reason: String },
}

enum Source {
    None,
    Frozen(Arc<GuidancePolicy>),
    Online(Box<OnlineGuidance>),
}

impl Source {
    fn guidance(&self) -> Option<&dyn Guidance> {
        match self {
            Source::None => None,
            Source::Frozen(p) => Some(p.as_ref()),
            Source::Online(g) => Some(g.as_ref()),
        }
    }
}

/// Everything a state broadcast shows.
#[derive(Debug, Clone, PartialEq)]
struct View {
    tick: u32,
    phase: Phase,
    human: HumanState,
    pose: RobotPose,
    wedges: WedgeVector,
    indicator: Option<GuidanceAction>,
    command: Option<ControlCommand>,
    intent: Option<IntentEstimate>,
}

pub struct Session {
    id: u64,
    world: Arc<World>,
    cfg: SessionConfig,
    base_seed: u64,
    episode: u64,
    seed: u64,
    start: RobotPose,
    source: Source,
    filter: Option<IntentFilter>,
    detector_rng: SimRng,
    filter_rng: SimRng,
    view: View,
    ticks: Vec<TickRecord>,
    outcome: Option<TraceOutcome>,
}

fn new_filter(cfg: &SessionConfig) -> Result<Option<IntentFilter>, SessionError> {
    Ok(match cfg.system {
        SystemKind::Ghal360 if cfg.trial.filter.enabled => Some(IntentFilter::new(cfg.trial.filter.clone())?),
        _ => None,
    })
}

fn start_pose(world: &World, cfg: &SessionConfig) -> Result<RobotPose, SessionError> {
    match cfg.start {
        Some(p) => Ok(p),
        None => world.default_start.map(|cell| RobotPose { cell, heading: Heading::EAST }).ok_or(SessionError::NoStart),
    }
}

/// Seed of episode `episode` of a session seeded with `seed`.
pub fn episode_seed(seed: u64, episode: u64) -> u64 {
    mix(seed, episode)
}

impl Session {
    /// A session for connection `id`; `policy` is required for RLGS and GHAL360.
    pub fn new(
        id: u64,
        world: Arc<World>,
        policy: Option<Arc<GuidancePolicy>>,
        q: Option<QTable>,
        cfg: SessionConfig,
        seed: u64,
    ) -> Result<Self, SessionError> {
        cfg.trial.validate()?;
        let start = start_pose(&world, &cfg)?;
        if !world.is_passable(start.cell) {
            return Err(wedgeguide::Error::OutOfRange(format!(
                "start cell ({}, {}) is not free",
                start.cell.row, start.cell.col
            ))
            .into());
        }
        let source = match (cfg.system.needs_policy(), cfg.online, q, policy) {
            (false, _, _, _) => Source::None,
            (true, true, None, _) => return Err(SessionError::MissingPolicy(cfg.system)),
            (true, true, Some(q), _) => {
                Source::Online(Box::new(OnlineGuidance { q, learner: cfg.learner.clone(), mdp: cfg.mdp.clone() }))
            }
            (true, _, _, Some(p)) => Source::Frozen(p),
            _ => return Err(SessionError::MissingPolicy(cfg.system)),
        };
        let placeholder = View {
            tick: 0,
            phase: Phase::Running,
            human: HumanState::default(),
            pose: start,
            wedges: WedgeVector::empty(),
            indicator: None,
            command: None,
            intent: None,
        };
        let mut s = Session {
            id,
            filter: None,
            detector_rng: stream(0, Stream::Detector),
            filter_rng: stream(0, Stream::Filter),
            world,
            cfg,
            base_seed: seed,
            episode: 0,
            seed: 0,
            start,
            source,
            view: placeholder,
            ticks: Vec::new(),
            outcome: None,
        };
        s.begin_episode()?;
        Ok(s)
    }

    fn begin_episode(&mut self) -> Result<(), SessionError> {
        self.seed = episode_seed(self.base_seed, self.episode);
        self.filter = new_filter(&self.cfg)?;
        self.detector_rng = stream(self.seed, Stream::Detector);
        self.filter_rng = stream(self.seed, Stream::Filter);
        let human = HumanState::default();
        let wedges = detect(&self.world, self.start, &self.cfg.trial.detector, &mut self.detector_rng);
        self.view = View {
            tick: 0,
            phase: phase_of(&wedges, human.focus),
            human,
            pose: self.start,
            wedges,
            indicator: indicator_for(self.cfg.system, &wedges, human.focus, self.source.guidance()),
            command: None,
            intent: self.filter.as_ref().map(IntentFilter::estimate),
        };
        self.ticks.clear();
        self.outcome = None;
        if self.view.phase == Phase::Found {
            self.finish(Phase::Found);
        }
        Ok(())
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn phase(&self) -> Phase {
        self.view.phase
    }

    pub fn pose(&self) -> RobotPose {
        self.view.pose
    }

    pub fn human(&self) -> HumanState {
        self.view.human
    }

    /// Detection currently on screen.
    pub fn wedges(&self) -> WedgeVector {
        self.view.wedges
    }

    pub fn indicator(&self) -> Option<GuidanceAction> {
        self.view.indicator
    }

    /// The Q-table of an online session.
    pub fn online_table(&self) -> Option<&QTable> {
        match &self.source {
            Source::Online(g) => Some(&g.q),
            _ => None,
        }
    }

    pub fn system(&self) -> SystemKind {
        self.cfg.system
    }

    pub fn hello(&self) -> ServerMessage {
        ServerMessage::new(ServerBody::Hello(Hello {
            session: self.id,
            system: self.cfg.system,
            cadence_ms: self.cfg.cadence_ms,
            map: MapInfo::from_world(&self.world),
        }))
    }

    /// The current state broadcast.
    pub fn snapshot(&self) -> ServerMessage {
        snapshot_of(&self.world, &self.cfg, &self.view)
    }

    /// Handles one text frame.
    ///
    /// Malformed frames get an `error` reply and leave the state untouched; a
    /// missing or unsupported `"v"` closes the session.
    pub fn handle_text(&mut self, text: &str) -> Reply {
        let value: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return Reply::Send(error("malformed", e.to_string())),
        };
        if !value.is_object() {
            return Reply::Send(error("malformed", "expected a JSON object".into()));
        }
        match value.get("v").and_then(Value::as_u64) {
            Some(v) if v == PROTOCOL_VERSION as u64 => {}
            Some(v) => {
                return Reply::Close {
                    code: CLOSE_UNSUPPORTED_VERSION,
                    reason: format!("protocol version {v} not supported"),
                }
            }
            None => return Reply::Close { code: CLOSE_UNSUPPORTED_VERSION, reason: "missing protocol version".into() },
        }
        match serde_json::from_value::<ClientMessage>(value) {
            Ok(m) => Reply::Send(self.handle(m.command)),
            Err(e) => Reply::Send(error("malformed", e.to_string())),
        }
    }

    /// Applies one command and returns its acknowledgement.
    pub fn handle(&mut self, cmd: ClientCommand) -> ServerMessage {
        match cmd {
            ClientCommand::Reset => {
                self.episode += 1;
                // configuration was validated at construction
                let _ = self.begin_episode();
                self.snapshot()
            }
            ClientCommand::SetFov { degrees } => {
                if degrees.is_finite() && (1.0..=360.0).contains(&degrees) {
                    self.snapshot()
                } else {
                    error("invalid_value", format!("fov {degrees} outside [1, 360] degrees"))
                }
            }
            _ if self.view.phase != Phase::Running => error("finished", "episode is over; send reset".into()),
            ClientCommand::Confirm => {
                let in_focus = target_in_focus(&self.world, self.view.pose, &self.view.human, &self.cfg.trial.detector);
                self.finish(if in_focus { Phase::Found } else { Phase::Aborted });
                self.snapshot()
            }
            ClientCommand::LookLeft => self.advance(Some(HumanMove::LookLeft)),
            ClientCommand::LookRight => self.advance(Some(HumanMove::LookRight)),
            ClientCommand::MoveForward => self.advance(Some(HumanMove::MoveForward)),
            ClientCommand::MoveBackward => self.advance(Some(HumanMove::MoveBackward)),
        }
    }

    /// An idle cadence tick; `None` once the episode is over.
    pub fn cadence(&mut self) -> Option<ServerMessage> {
        (self.view.phase == Phase::Running).then(|| self.advance(None))
    }

    fn advance(&mut self, input: Option<HumanMove>) -> ServerMessage {
        let world = self.world.clone();
        let mut pose = self.view.pose;
        let mut human = self.view.human;
        match input {
            Some(m) if self.cfg.system == SystemKind::Mfo => {
                let c = match m {
                    HumanMove::LookLeft => ControlCommand::RotateLeft,
                    HumanMove::LookRight => ControlCommand::RotateRight,
                    HumanMove::MoveForward => ControlCommand::Forward,
                    HumanMove::MoveBackward => ControlCommand::Backward,
                };
                pose = step_robot(&world, pose, c);
            }
            Some(m) => {
                let (next, cmd) = apply_human_move(human, m);
                if let Some(c) = cmd {
                    pose = match self.cfg.trial.move_frame {
                        MoveFrame::Heading => step_robot(&world, pose, c),
                        MoveFrame::Gaze => {
                            let gaze = pose.heading.turned(next.focus.get() as i64);
                            translate(&world, pose, gaze, c == ControlCommand::Backward)
                        }
                    };
                }
                if let (Some(a), Source::Online(g)) = (self.view.indicator, &mut self.source) {
                    let before = to_egocentric(&self.view.wedges, human.focus);
                    let after = to_egocentric(&self.view.wedges, next.focus);
                    g.observe(&before, a, &after);
                }
                human = next;
            }
            None => human.last_motion = HeadMotion::None,
        }

        let intent = self
            .filter
            .as_mut()
            .map(|f| f.step(&Evidence { head_motion: human.last_motion, focused: human.focus }, &mut self.filter_rng));
        let mut command = None;
        if let (None, Some(f), Some(estimate)) = (input, self.filter.as_mut(), intent) {
            let c = controller(&estimate);
            command = Some(c);
            pose = step_robot(&world, pose, c);
            let turn = match c {
                ControlCommand::RotateLeft => 1,
                ControlCommand::RotateRight => -1,
                _ => 0,
            };
            if turn != 0 {
                human.focus = human.focus.shift(-turn);
                f.set.rotate(-turn);
            }
        }

        let wedges = detect(&world, pose, &self.cfg.trial.detector, &mut self.detector_rng);
        let indicator = indicator_for(self.cfg.system, &wedges, human.focus, self.source.guidance());
        let tick = self.view.tick + 1;
        self.view =
            View { tick, phase: phase_of(&wedges, human.focus), human, pose, wedges, indicator, command, intent };
        self.ticks.push(TickRecord { tick, pose, human, wedges, indicator, human_move: input, intent, command });
        if self.view.phase == Phase::Found {
            self.finish(Phase::Found);
        }
        self.snapshot()
    }

    fn finish(&mut self, phase: Phase) {
        self.view.phase = phase;
        let correct = phase == Phase::Found
            && target_in_focus(&self.world, self.view.pose, &self.view.human, &self.cfg.trial.detector);
        self.outcome = Some(TraceOutcome {
            ticks: self.view.tick,
            elapsed_s: self.view.tick as f64 * self.cfg.trial.tick_seconds,
            success: phase == Phase::Found,
            correct,
        });
    }

    /// The current episode as a trace in the same schema as simulated trials.
    pub fn record(&self) -> Trace {
        Trace {
            header: TraceHeader {
                v: TRACE_VERSION,
                source: "session".into(),
                system: self.cfg.system,
                map: self.world.name.clone(),
                seed: self.seed,
                start: self.start,
                start_distance: self.world.geodesic_distance(self.start.cell),
            },
            ticks: self.ticks.clone(),
            outcome: self.outcome.clone(),
        }
    }
}

fn phase_of(wedges: &WedgeVector, focus: WedgeIndex) -> Phase {
    if wedges.get(focus).contains_target() {
        Phase::Found
    } else {
        Phase::Running
    }
}

fn error(code: &str, reason: String) -> ServerMessage {
    ServerMessage::new(ServerBody::Error(ErrorBody { code: code.into(), reason }))
}

fn panorama(world: &World, pose: RobotPose, wedges: &WedgeVector, range: f64) -> Vec<PanoramaWedge> {
    let seen: Vec<(usize, WedgeIndex)> = visible_objects(world, pose, range).collect();
    let target = world.target_index();
    WedgeIndex::all()
        .map(|k| {
            let v = wedges.get(k);
            let mut labels = Vec::new();
            if v.contains_target() {
                labels.push(world.target().name.clone());
            }
            if v.contains_clutter() {
                let before = labels.len();
                labels.extend(
                    seen.iter().filter(|(i, w)| *w == k && *i != target).map(|(i, _)| world.objects[*i].name.clone()),
                );
                if labels.len() == before {
                    labels.push("?".into());
                }
            }
            PanoramaWedge { wedge: k, value: wedge_value_name(v).into(), labels }
        })
        .collect()
}

fn snapshot_of(world: &World, cfg: &SessionConfig, view: &View) -> ServerMessage {
    ServerMessage::new(ServerBody::State(StateSnapshot {
        tick: view.tick,
        phase: view.phase,
        focus: view.human.focus,
        head: view.human.last_motion,
        indicator: view.indicator,
        panorama: panorama(world, view.pose, &view.wedges, cfg.trial.detector.range),
        robot: view.pose,
        command: view.command,
        intent: view.intent,
    }))
}

/// Rebuilds the state broadcasts of a recorded session episode: the opening
/// state, one per tick, and the closing one when a confirm ended the episode.
///
/// `policy` must be the one the session started with.
pub fn replay_broadcasts(
    world: &World,
    trace: &Trace,
    policy: Option<&GuidancePolicy>,
    cfg: &SessionConfig,
) -> Result<Vec<ServerMessage>, SessionError> {
    if trace.header.system != cfg.system {
        return Err(SessionError::TraceMismatch(format!(
            "trace system {} but session system {}",
            trace.header.system, cfg.system
        )));
    }
    let mut rng = stream(trace.header.seed, Stream::Detector);
    let human = HumanState::default();
    let wedges = detect(world, trace.header.start, &cfg.trial.detector, &mut rng);
    let guidance = policy.map(|p| p as &dyn Guidance);
    let mut views = vec![View {
        tick: 0,
        phase: phase_of(&wedges, human.focus),
        human,
        pose: trace.header.start,
        wedges,
        indicator: indicator_for(cfg.system, &wedges, human.focus, guidance),
        command: None,
        intent: new_filter(cfg)?.as_ref().map(IntentFilter::estimate),
    }];
    for t in &trace.ticks {
        views.push(View {
            tick: t.tick,
            phase: phase_of(&t.wedges, t.human.focus),
            human: t.human,
            pose: t.pose,
            wedges: t.wedges,
            indicator: t.indicator,
            command: t.command,
            intent: t.intent,
        });
    }
    if let (Some(o), Some(last)) = (&trace.outcome, views.last().cloned()) {
        if last.phase == Phase::Running {
            views.push(View { phase: if o.success { Phase::Found } else { Phase::Aborted }, ..last });
        }
    }
    Ok(views.iter().map(|v| snapshot_of(world, cfg, v)).collect())
}

/// Egocentric state the indicator was computed from.
pub fn shown_state(s: &Session) -> EgoState {
    to_egocentric(&s.view.wedges, s.view.human.focus)
}
