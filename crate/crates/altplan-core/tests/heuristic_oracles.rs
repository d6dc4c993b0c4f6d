//! Heuristic correctness against independent references: the h_max/h_add
//! sandwich, the zero/infinity characterizations and dead-end safety.

use altplan_core::heuristic::{h0_of, h_ff, INFINITE_H};
use altplan_core::task::State;
use altplan_testkit::exhaustive::{bfs_plan, goal_reachable_from, reachable_states, Exhaustive};
use altplan_testkit::relaxation::{h_add, h_max, optimal_relaxed_plan_len, relaxed_reachable};
use altplan_testkit::tasks;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn chain_value_matches_brute_force_relaxed_plan() {
    let task = tasks::two_op_chain();
    let optimal = optimal_relaxed_plan_len(&task, &task.initial);
    assert_eq!(optimal, Some(2));
    assert_eq!(h0_of(&task), 2);
}

#[test]
fn sandwich_and_characterizations_on_random_tasks() {
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    for _ in 0..150 {
        let task = tasks::random_small_task(&mut rng, 12);
        let states = reachable_states(&task, 2000).expect("tiny state space");
        for state in states.iter().take(40) {
            let h = h_ff(&task, state);
            let reachable = relaxed_reachable(&task, state);
            assert_eq!(h == INFINITE_H, !reachable, "infinity iff relaxed-unreachable");
            assert_eq!(h == 0, task.goal_satisfied(state), "zero iff goal satisfied");
            if h != INFINITE_H {
                let lo = h_max(&task, state).expect("h_max defined when h_ff finite");
                let hi = h_add(&task, state).expect("h_add defined when h_ff finite");
                assert!(
                    lo <= u64::from(h) && u64::from(h) <= hi,
                    "sandwich violated: h_max={lo} h_ff={h} h_add={hi}"
                );
            }
        }
    }
}

#[test]
fn h_ff_never_exceeds_optimal_relaxed_plan_by_construction_lower_bound() {
    // The extracted relaxed plan is a real relaxed plan, so its length is at
    // least the optimal relaxed plan length.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..60 {
        let task = tasks::random_small_task(&mut rng, 10);
        let h = h_ff(&task, &task.initial);
        match optimal_relaxed_plan_len(&task, &task.initial) {
            Some(opt) => {
                assert_ne!(h, INFINITE_H);
                assert!(h >= opt, "h_ff={h} below optimal relaxed plan {opt}");
            }
            None => assert_eq!(h, INFINITE_H),
        }
    }
}

#[test]
fn infinite_h_implies_no_plan_exists() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut dead_ends_seen = 0;
    for _ in 0..120 {
        let task = tasks::random_small_task(&mut rng, 12);
        let states = reachable_states(&task, 2000).expect("tiny state space");
        for state in states.iter().take(25) {
            if h_ff(&task, state) == INFINITE_H {
                dead_ends_seen += 1;
                assert_eq!(
                    goal_reachable_from(&task, state, 10_000),
                    Some(false),
                    "h_ff reported infinity on a state that can still reach the goal"
                );
            }
        }
    }
    assert!(dead_ends_seen > 20, "suite too easy: only {dead_ends_seen} dead ends sampled");
}

#[test]
fn corridor_distances_and_solvable_oracle_agree() {
    let task = tasks::corridor(7);
    match bfs_plan(&task, 1000) {
        Exhaustive::Solved(plan) => assert_eq!(plan.len(), 7),
        other => panic!("corridor should be solvable, got {other:?}"),
    }
    for pos in 0..=7u16 {
        assert_eq!(h_ff(&task, &State::new(vec![pos])), 7 - u32::from(pos));
    }
}

#[test]
fn plateau_task_has_constant_h() {
    let task = tasks::toggle_plateau(6);
    let states = reachable_states(&task, 1000).expect("small space");
    assert!(states.len() >= 10);
    for state in &states {
        assert_eq!(h_ff(&task, state), 2);
    }
    assert_eq!(bfs_plan(&task, 10_000), Exhaustive::Unsolvable);
}
