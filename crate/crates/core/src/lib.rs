//! Attention guidance for target search with a 360° telepresence robot.
//!
//! The robot sees all around it; the operator sees one wedge at a time. This
//! crate models the scene as eight wedges, learns a guidance policy (left /
//! right indicators, or confirm) with tabular Q-learning on an abstract MDP,
//! estimates where the operator intends to go with a particle filter, and
//! evaluates five systems in a grid-world simulation with a virtual human.
//!
//! Runnable walkthroughs live in `examples/`; see the README for a tour.

pub mod error;
pub mod harness;
pub mod intent;
pub mod learning;
pub mod mdp;
pub mod policy;
pub mod qtable;
pub mod rng;
pub mod systems;
pub mod trace;
pub mod wedge;
pub mod world;

pub use error::{Error, Result};
pub use learning::{q_update, select_action, train, LearnerConfig, TrainingRun};
pub use mdp::{oracle_agreement, reachable_states, solve_value_iteration, MdpConfig, ScenarioConfig};
pub use policy::{greedy_policy, Guidance, GuidancePolicy};
pub use qtable::{load_qtable, save_qtable, QTable};
pub use systems::{run_trial, SystemKind, TrialConfig, TrialResult};
pub use wedge::{EgoState, GuidanceAction, WedgeIndex, WedgeValue, WedgeVector};
