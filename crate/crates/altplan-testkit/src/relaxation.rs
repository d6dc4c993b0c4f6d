//! Reference implementations over the delete relaxation, written as plain
//! fixpoint iterations (no priority queues, no supporter bookkeeping) so they
//! share no structure with the production heuristic.

use std::collections::{HashSet, VecDeque};

use altplan_core::task::{State, Task, Val, Var};

fn fact_index(task: &Task) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(task.num_variables());
    let mut total = 0;
    for def in &task.variables {
        offsets.push(total);
        total += def.domain_size;
    }
    (offsets, total)
}

fn fact(offsets: &[usize], var: Var, val: Val) -> usize {
    offsets[var] + val as usize
}

/// Value-iteration computation of unary-cost h_add / h_max fact costs.
/// `sum_aggregation` selects h_add (true) or h_max (false).
fn fact_costs(task: &Task, state: &State, sum_aggregation: bool) -> Vec<Option<u64>> {
    let (offsets, total) = fact_index(task);
    let mut cost: Vec<Option<u64>> = vec![None; total];
    for (var, &val) in state.values().iter().enumerate() {
        cost[fact(&offsets, var, val)] = Some(0);
    }
    loop {
        let mut changed = false;
        for op in &task.operators {
            let mut agg: u64 = 0;
            let mut reachable = true;
            for &(var, val) in op.precondition.entries() {
                match cost[fact(&offsets, var, val)] {
                    Some(c) => {
                        if sum_aggregation {
                            agg += c;
                        } else {
                            agg = agg.max(c);
                        }
                    }
                    None => {
                        reachable = false;
                        break;
                    }
                }
            }
            if !reachable {
                continue;
            }
            let candidate = agg + 1; // unary operator cost
            for &(var, val) in op.effect.entries() {
                let slot = &mut cost[fact(&offsets, var, val)];
                if slot.map_or(true, |c| candidate < c) {
                    *slot = Some(candidate);
                    changed = true;
                }
            }
        }
        if !changed {
            return cost;
        }
    }
}

fn goal_aggregate(task: &Task, costs: &[Option<u64>], sum_aggregation: bool) -> Option<u64> {
    let (offsets, _) = fact_index(task);
    let mut agg: u64 = 0;
    for &(var, val) in task.goal.entries() {
        let c = costs[fact(&offsets, var, val)]?;
        if sum_aggregation {
            agg += c;
        } else {
            agg = agg.max(c);
        }
    }
    Some(agg)
}

/// Reference h_add with unary operator costs. `None` means unreachable.
pub fn h_add(task: &Task, state: &State) -> Option<u64> {
    let costs = fact_costs(task, state, true);
    goal_aggregate(task, &costs, true)
}

/// Reference h_max with unary operator costs. `None` means unreachable.
pub fn h_max(task: &Task, state: &State) -> Option<u64> {
    let costs = fact_costs(task, state, false);
    goal_aggregate(task, &costs, false)
}

/// Set-closure fixpoint: is the goal reachable in the delete relaxation?
pub fn relaxed_reachable(task: &Task, state: &State) -> bool {
    let (offsets, total) = fact_index(task);
    let mut reached = vec![false; total];
    for (var, &val) in state.values().iter().enumerate() {
        reached[fact(&offsets, var, val)] = true;
    }
    loop {
        let mut changed = false;
        for op in &task.operators {
            if op.precondition.entries().iter().any(|&(v, val)| !reached[fact(&offsets, v, val)]) {
                continue;
            }
            for &(var, val) in op.effect.entries() {
                let slot = fact(&offsets, var, val);
                if !reached[slot] {
                    reached[slot] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    task.goal.entries().iter().all(|&(v, val)| reached[fact(&offsets, v, val)])
}

/// Length of an optimal relaxed plan, found by breadth-first search over
/// fact sets. Only usable on tasks with a small fact count (<= ~20).
/// `None` means the goal is unreachable in the relaxation.
pub fn optimal_relaxed_plan_len(task: &Task, state: &State) -> Option<u32> {
    let (offsets, total) = fact_index(task);
    assert!(total <= 24, "optimal relaxed plan oracle is exponential in the fact count");
    let to_mask = |facts: &[(Var, Val)]| -> u64 {
        facts.iter().fold(0u64, |m, &(v, val)| m | (1 << fact(&offsets, v, val)))
    };
    let mut start: u64 = 0;
    for (var, &val) in state.values().iter().enumerate() {
        start |= 1 << fact(&offsets, var, val);
    }
    let goal = to_mask(task.goal.entries());
    let ops: Vec<(u64, u64)> = task
        .operators
        .iter()
        .map(|op| (to_mask(op.precondition.entries()), to_mask(op.effect.entries())))
        .collect();

    let mut seen: HashSet<u64> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start);
    queue.push_back((start, 0u32));
    while let Some((mask, depth)) = queue.pop_front() {
        if mask & goal == goal {
            return Some(depth);
        }
        for &(pre, eff) in &ops {
            if mask & pre != pre {
                continue;
            }
            let next = mask | eff;
            if seen.insert(next) {
                queue.push_back((next, depth + 1));
            }
        }
    }
    None
}
