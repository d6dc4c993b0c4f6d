//! A minimal standalone greedy best-first search used as a trace oracle.
//!
//! Tie-breaking contract mirrors the production planner: the open list is
//! ordered by (heuristic value, insertion serial), duplicates are dropped at
//! generation time, the goal is tested when a node is popped for expansion,
//! and successors are generated in operator-index order.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use altplan_core::task::{Plan, State, Task};

pub struct GbfsTrace {
    /// States in the order they were expanded (goal pop excluded).
    pub expanded: Vec<State>,
    pub plan: Option<Plan>,
}

/// Runs plain GBFS to completion (or `max_expansions`) with the supplied
/// heuristic. `h` returns `u32::MAX` for dead ends.
pub fn reference_gbfs(
    task: &Task,
    mut h: impl FnMut(&State) -> u32,
    max_expansions: usize,
) -> GbfsTrace {
    struct Node {
        state: State,
        parent: Option<usize>,
        op: Option<usize>,
    }

    let mut nodes: Vec<Node> = vec![Node { state: task.initial.clone(), parent: None, op: None }];
    let mut seen: HashMap<State, usize> = HashMap::new();
    seen.insert(task.initial.clone(), 0);
    let mut open: BinaryHeap<Reverse<(u32, usize)>> = BinaryHeap::new();
    open.push(Reverse((h(&task.initial), 0)));

    let mut expanded = Vec::new();
    while let Some(Reverse((_, id))) = open.pop() {
        let state = nodes[id].state.clone();
        if task.goal_satisfied(&state) {
            let mut steps = Vec::new();
            let mut cur = id;
            while let Some(op) = nodes[cur].op {
                steps.push(op);
                cur = nodes[cur].parent.expect("non-root node without parent");
            }
            steps.reverse();
            let plan = Plan::from_steps(task, steps).expect("reference gbfs built a bad plan");
            return GbfsTrace { expanded, plan: Some(plan) };
        }
        expanded.push(state.clone());
        if expanded.len() >= max_expansions {
            break;
        }
        for (i, op) in task.operators.iter().enumerate() {
            if !op.applicable_in(&state) {
                continue;
            }
            let next = op.apply(&state);
            if seen.contains_key(&next) {
                continue;
            }
            let nid = nodes.len();
            nodes.push(Node { state: next.clone(), parent: Some(id), op: Some(i) });
            seen.insert(next.clone(), nid);
            open.push(Reverse((h(&next), nid)));
        }
    }
    GbfsTrace { expanded, plan: None }
}
