//! Abstract MDP semantics against digit-level oracles.

use std::collections::HashMap;

use proptest::prelude::*;
use wedgeguide::mdp::{initial_state, reward, sample_response, transition, transition_with, Response};
use wedgeguide::rng::rng_from_seed;
use wedgeguide::wedge::{StateIndex, NUM_STATES};
use wedgeguide::{reachable_states, solve_value_iteration, EgoState, GuidanceAction, MdpConfig, ScenarioConfig};

/// Base-4 digit of ego wedge `k` in state index `i`.
fn digit(i: usize, k: i64) -> usize {
    (i >> (2 * k.rem_euclid(8))) & 3
}

/// Index of the state seen after turning the focus by `delta` wedges.
fn shifted(i: usize, delta: i64) -> usize {
    (0..8).map(|k| digit(i, k + delta) << (2 * k)).sum()
}

fn mirrored(i: usize) -> usize {
    (0..8).map(|k| digit(i, -k) << (2 * k)).sum()
}

fn table_reward(a: GuidanceAction, landing: usize) -> f64 {
    match (a, landing) {
        (GuidanceAction::Confirm, 2 | 3) => 250.0,
        (GuidanceAction::Confirm, _) => -250.0,
        (_, 1 | 3) => -15.0,
        _ => -3.0,
    }
}

#[test]
fn reward_table_exhaustive() {
    let cfg = MdpConfig::default();
    let responses = [Response::Comply, Response::Stray { left: true }, Response::Stray { left: false }];
    for i in 0..NUM_STATES {
        let s = EgoState::decode(StateIndex::new(i).unwrap());
        for a in GuidanceAction::ALL {
            for r in responses {
                let next = transition_with(&s, a, r);
                let delta = match (a, r) {
                    (GuidanceAction::Confirm, _) => 0,
                    (GuidanceAction::Left, Response::Comply) => 1,
                    (GuidanceAction::Right, Response::Comply) => -1,
                    (_, Response::Stray { left }) => {
                        if left {
                            1
                        } else {
                            -1
                        }
                    }
                };
                assert_eq!(next.encode().get(), shifted(i, delta), "state {i} {a:?} {r:?}");
                assert_eq!(reward(&s, a, &next, &cfg), table_reward(a, digit(i, delta)), "state {i} {a:?} {r:?}");
            }
        }
    }
}

#[test]
fn compliance_frequency_matches_configuration() {
    for (p, seed) in [(0.8, 1), (0.95, 2), (0.3, 3)] {
        let cfg = MdpConfig { p_comply: p, ..Default::default() };
        let mut rng = rng_from_seed(seed);
        let n = 100_000;
        let complied = (0..n).filter(|_| sample_response(&cfg, &mut rng) == Response::Comply).count();
        let rate = complied as f64 / n as f64;
        assert!((rate - p).abs() <= 0.01, "p_comply {p}: observed {rate}");
    }
}

#[test]
fn value_iteration_mirror_symmetry() {
    let (q, _) = solve_value_iteration(&MdpConfig::default(), 0.95, 1e-9).unwrap();
    for i in 0..NUM_STATES {
        let s = StateIndex::new(i).unwrap();
        let m = StateIndex::new(mirrored(i)).unwrap();
        let (left, right) = (q.get(s, GuidanceAction::Left), q.get(m, GuidanceAction::Right));
        assert!((left - right).abs() <= 1e-9, "state {i}: {left} vs {right}");
        assert!((q.get(s, GuidanceAction::Confirm) - q.get(m, GuidanceAction::Confirm)).abs() <= 1e-9);
    }
}

#[test]
fn value_iteration_matches_gauss_seidel_oracle() {
    let cfg = MdpConfig::default();
    let gamma = 0.95;
    let (q, report) = solve_value_iteration(&cfg, gamma, 1e-9).unwrap();
    assert_eq!(report.iterations, 458);

    let states: Vec<usize> = reachable_states(&ScenarioConfig::default()).iter().map(|s| s.get()).collect();
    let pos: HashMap<usize, usize> = states.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut v = vec![0.0f64; states.len()];
    let stray = (1.0 - cfg.p_comply) / 2.0;
    let backup = |v: &[f64], i: usize| -> [f64; 3] {
        let (l, r) = (shifted(i, 1), shifted(i, -1));
        let via_l = table_reward(GuidanceAction::Left, digit(i, 1)) + gamma * v[pos[&l]];
        let via_r = table_reward(GuidanceAction::Right, digit(i, -1)) + gamma * v[pos[&r]];
        [
            table_reward(GuidanceAction::Confirm, digit(i, 0)),
            (cfg.p_comply + stray) * via_l + stray * via_r,
            (cfg.p_comply + stray) * via_r + stray * via_l,
        ]
    };
    loop {
        let mut change = 0.0f64;
        for (k, &i) in states.iter().enumerate() {
            let row = backup(&v, i);
            let best = row[0].max(row[1]).max(row[2]);
            change = change.max((best - v[k]).abs());
            v[k] = best;
        }
        if change < 1e-12 {
            break;
        }
    }
    for &i in &states {
        let row = backup(&v, i);
        let s = StateIndex::new(i).unwrap();
        for a in GuidanceAction::ALL {
            let (got, want) = (q.get(s, a), row[a.index()]);
            assert!((got - want).abs() <= 1e-6, "state {i} {a:?}: {got} vs {want}");
        }
    }
}

#[test]
fn reachable_set_is_closed_and_covers_the_generator() {
    let scenario = ScenarioConfig::default();
    let states = reachable_states(&scenario);
    let set: std::collections::HashSet<usize> = states.iter().map(|s| s.get()).collect();
    for &i in &set {
        assert!(set.contains(&shifted(i, 1)) && set.contains(&shifted(i, -1)));
    }
    let mut rng = rng_from_seed(4);
    for _ in 0..10_000 {
        assert!(set.contains(&initial_state(&scenario, &mut rng).encode().get()));
    }
}

fn arb_state() -> impl Strategy<Value = EgoState> {
    (0..NUM_STATES).prop_map(|i| EgoState::decode(StateIndex::new(i).unwrap()))
}

proptest! {
    #[test]
    fn transition_preserves_the_multiset(s in arb_state(), a in 0usize..3, seed in any::<u64>(), p in 0.0f64..=1.0) {
        let cfg = MdpConfig { p_comply: p, ..Default::default() };
        let a = GuidanceAction::from_index(a).unwrap();
        let next = transition(&s, a, &cfg, &mut rng_from_seed(seed));
        let mut before: Vec<u8> = s.0.iter().map(|v| v.digit()).collect();
        let mut after: Vec<u8> = next.0.iter().map(|v| v.digit()).collect();
        before.sort_unstable();
        after.sort_unstable();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn confirm_never_moves_the_focus(s in arb_state(), seed in any::<u64>()) {
        let next = transition(&s, GuidanceAction::Confirm, &MdpConfig::default(), &mut rng_from_seed(seed));
        prop_assert_eq!(next, s);
    }
}
