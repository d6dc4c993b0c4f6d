//! Brute-force forward search over the real (unrelaxed) state space.

use std::collections::{HashMap, HashSet, VecDeque};

use altplan_core::task::{Plan, State, Task};

/// Result of exhaustive breadth-first search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exhaustive {
    /// A step-minimal plan (breadth-first over operator applications).
    Solved(Plan),
    /// The full reachable space was enumerated without hitting the goal.
    Unsolvable,
    /// More than `max_states` states were reached; no verdict.
    Overflow,
}

/// Breadth-first search from the initial state, capped at `max_states`
/// distinct states. Returns a shortest plan by step count.
pub fn bfs_plan(task: &Task, max_states: usize) -> Exhaustive {
    let mut seen: HashMap<State, (Option<State>, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(task.initial.clone(), (None, usize::MAX));
    queue.push_back(task.initial.clone());

    while let Some(state) = queue.pop_front() {
        if task.goal_satisfied(&state) {
            let mut steps = Vec::new();
            let mut cur = state;
            while let Some((parent, op)) = seen.get(&cur).cloned() {
                match parent {
                    Some(p) => {
                        steps.push(op);
                        cur = p;
                    }
                    None => break,
                }
            }
            steps.reverse();
            return Exhaustive::Solved(Plan::from_steps(task, steps).expect("bfs produced bad plan"));
        }
        for (i, op) in task.operators.iter().enumerate() {
            if !op.applicable_in(&state) {
                continue;
            }
            let next = op.apply(&state);
            if seen.contains_key(&next) {
                continue;
            }
            if seen.len() >= max_states {
                return Exhaustive::Overflow;
            }
            seen.insert(next.clone(), (Some(state.clone()), i));
            queue.push_back(next);
        }
    }
    Exhaustive::Unsolvable
}

/// All states reachable from the initial state, capped at `max_states`.
/// Returns `None` on overflow.
pub fn reachable_states(task: &Task, max_states: usize) -> Option<Vec<State>> {
    let mut seen: HashSet<State> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(task.initial.clone());
    queue.push_back(task.initial.clone());
    let mut out = vec![task.initial.clone()];

    while let Some(state) = queue.pop_front() {
        for op in &task.operators {
            if !op.applicable_in(&state) {
                continue;
            }
            let next = op.apply(&state);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= max_states {
                return None;
            }
            seen.insert(next.clone());
            out.push(next.clone());
            queue.push_back(next);
        }
    }
    Some(out)
}

/// Whether the goal is reachable from `state` (bounded breadth-first).
/// Returns `None` on overflow.
pub fn goal_reachable_from(task: &Task, state: &State, max_states: usize) -> Option<bool> {
    let mut seen: HashSet<State> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(state.clone());
    queue.push_back(state.clone());

    while let Some(s) = queue.pop_front() {
        if task.goal_satisfied(&s) {
            return Some(true);
        }
        for op in &task.operators {
            if !op.applicable_in(&s) {
                continue;
            }
            let next = op.apply(&s);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= max_states {
                return None;
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    Some(false)
}
