//! Scripted micro-tasks with known structure, plus a random generator for
//! small tasks used in the heuristic oracle suites.

use altplan_core::task::{Operator, PartialAssignment, State, Task, Val, Var, VariableDef};
use rand::Rng;

fn var(id: Var, name: &str, size: usize) -> VariableDef {
    VariableDef {
        id,
        name: name.to_string(),
        domain_size: size,
        value_names: (0..size).map(|v| format!("{name}-{v}")).collect(),
    }
}

fn pa(entries: &[(Var, Val)]) -> PartialAssignment {
    PartialAssignment::new(entries.to_vec()).expect("duplicate variable in scripted assignment")
}

fn op(name: &str, pre: &[(Var, Val)], eff: &[(Var, Val)], cost: u32) -> Operator {
    Operator { name: name.to_string(), precondition: pa(pre), effect: pa(eff), cost }
}

/// Two binary variables; `a` sets v0, `b` needs v0 and sets v1 (the goal).
/// Unique plan [a, b], cost 2, and the relaxed distance from the initial
/// state is exactly 2.
pub fn two_op_chain() -> Task {
    Task::new(
        vec![var(0, "v0", 2), var(1, "v1", 2)],
        vec![op("a", &[], &[(0, 1)], 1), op("b", &[(0, 1)], &[(1, 1)], 1)],
        State::new(vec![0, 0]),
        pa(&[(1, 1)]),
        true,
    )
    .expect("chain task is well-formed")
}

/// A single corridor of `len` forward moves: position 0 to position `len`,
/// goal at the end, no branching. The heuristic value at position i is
/// `len - i`.
pub fn corridor(len: usize) -> Task {
    assert!(len >= 1);
    let ops = (0..len)
        .map(|i| op(&format!("step-{i}"), &[(0, i as Val)], &[(0, (i + 1) as Val)], 1))
        .collect();
    Task::new(
        vec![var(0, "pos", len + 1)],
        ops,
        State::new(vec![0]),
        pa(&[(0, len as Val)]),
        true,
    )
    .expect("corridor task is well-formed")
}

/// A start node with one outgoing chain per entry of `lens`, all ending in a
/// shared goal value. Expanding the initial state leaves one open node per
/// branch, with heuristic values equal to the branch lengths. The branch
/// entry operators are emitted in `lens` order.
pub fn multi_branch(lens: &[usize]) -> Task {
    assert!(!lens.is_empty() && lens.iter().all(|&l| l >= 1));
    let total = 1 + lens.iter().sum::<usize>() + 1;
    let goal_val = (total - 1) as Val;
    let mut first = Vec::with_capacity(lens.len());
    let mut next = 1 as Val;
    for &len in lens {
        first.push(next);
        next += len as Val;
    }
    let mut ops = Vec::new();
    for (b, &head) in first.iter().enumerate() {
        ops.push(op(&format!("enter-{b}"), &[(0, 0)], &[(0, head)], 1));
    }
    for (b, &len) in lens.iter().enumerate() {
        let head = first[b];
        for i in 0..len - 1 {
            let here = head + i as Val;
            ops.push(op(&format!("chain-{b}-{i}"), &[(0, here)], &[(0, here + 1)], 1));
        }
        ops.push(op(&format!("finish-{b}"), &[(0, head + (len - 1) as Val)], &[(0, goal_val)], 1));
    }
    Task::new(
        vec![var(0, "pos", total)],
        ops,
        State::new(vec![0]),
        pa(&[(0, goal_val)]),
        true,
    )
    .expect("multi-branch task is well-formed")
}

/// Two-branch special case of [`multi_branch`].
pub fn two_branch(short: usize, long: usize) -> Task {
    multi_branch(&[short, long])
}

/// A hub with `k` leaves, each one step from the goal. Expanding the initial
/// state leaves exactly `k` open nodes, all with heuristic value 1.
pub fn star(k: usize) -> Task {
    assert!(k >= 1);
    let goal_val = (k + 1) as Val;
    let mut ops = Vec::new();
    for i in 1..=k {
        ops.push(op(&format!("to-leaf-{i}"), &[(0, 0)], &[(0, i as Val)], 1));
    }
    for i in 1..=k {
        ops.push(op(&format!("leaf-{i}-goal"), &[(0, i as Val)], &[(0, goal_val)], 1));
    }
    Task::new(
        vec![var(0, "pos", k + 2)],
        ops,
        State::new(vec![0]),
        pa(&[(0, goal_val)]),
        true,
    )
    .expect("star task is well-formed")
}

/// An unsolvable task on which the heuristic is constant: the goal needs two
/// mutually-exclusive flags at once (each setter clears the other), which the
/// delete relaxation cannot see. A `positions`-long spectator corridor pads
/// the reachable space to `2 * positions` states, all with heuristic value 2.
/// With `positions == 1` this is a two-state unsolvable task.
pub fn toggle_plateau(positions: usize) -> Task {
    assert!(positions >= 1);
    let mut ops = vec![
        op("set-a", &[], &[(0, 1), (1, 0)], 1),
        op("set-b", &[], &[(1, 1), (0, 0)], 1),
        op("finish", &[(0, 1), (1, 1)], &[(3, 1)], 1),
    ];
    for i in 0..positions.saturating_sub(1) {
        ops.push(op(&format!("drift-{i}"), &[(2, i as Val)], &[(2, (i + 1) as Val)], 1));
    }
    Task::new(
        vec![var(0, "a", 2), var(1, "b", 2), var(2, "pos", positions), var(3, "done", 2)],
        ops,
        State::new(vec![1, 0, 0, 0]),
        pa(&[(3, 1)]),
        true,
    )
    .expect("plateau task is well-formed")
}

/// A solvable task whose heuristic is a constant-2 plateau almost
/// everywhere: the relaxation is fooled by a mutually-exclusive flag pair
/// (as in [`toggle_plateau`]), while the only real solution runs down a
/// `depth`-long corridor. `flips` free binary variables pad the plateau to
/// `2^flips * 2 * (depth + 1)` states.
///
/// Since every state ties on h, depth-first search dives the corridor in
/// about `depth` expansions (the move operator comes first, so the corridor
/// child is always on top of the stack), while queue-driven routines wade
/// through the plateau in generation order. Budgets between roughly
/// `2 * depth` and half the state count make this a task that only
/// heuristic-guided depth-first search can solve.
pub fn masked_corridor(flips: usize, depth: usize) -> Task {
    assert!(depth >= 2);
    let pos_var = 0;
    let lock_a = 1;
    let lock_b = 2;
    let done = 3;
    let flip0 = 4;
    let mut variables = vec![
        var(pos_var, "pos", depth + 1),
        var(lock_a, "lock-a", 2),
        var(lock_b, "lock-b", 2),
        var(done, "done", 2),
    ];
    for i in 0..flips {
        variables.push(var(flip0 + i, &format!("flip{i}"), 2));
    }

    // Move operators first: among equal-h children the first-generated one
    // ends on top of the DFS stack.
    let mut ops = Vec::new();
    for i in 0..depth {
        ops.push(op(&format!("move-{i}"), &[(pos_var, i as Val)], &[(pos_var, (i + 1) as Val)], 1));
    }
    ops.push(op("finish", &[(pos_var, depth as Val)], &[(done, 1)], 1));
    // The lock: the relaxation believes both flags can hold at once.
    ops.push(op("lock-set-a", &[], &[(lock_a, 1), (lock_b, 0)], 1));
    ops.push(op("lock-set-b", &[], &[(lock_b, 1), (lock_a, 0)], 1));
    ops.push(op("lock-finish", &[(lock_a, 1), (lock_b, 1)], &[(done, 1)], 1));
    for i in 0..flips {
        ops.push(op(&format!("flip{i}-on"), &[(flip0 + i, 0)], &[(flip0 + i, 1)], 1));
        ops.push(op(&format!("flip{i}-off"), &[(flip0 + i, 1)], &[(flip0 + i, 0)], 1));
    }

    let mut initial = vec![0, 1, 0, 0];
    initial.extend(std::iter::repeat(0).take(flips));
    Task::new(variables, ops, State::new(initial), pa(&[(done, 1)]), true)
        .expect("masked-corridor task is well-formed")
}

/// Adds a fresh variable that no operator touches, with an unsatisfied goal
/// value. The result is unsolvable and relaxed-unreachable everywhere.
pub fn with_unreachable_goal(task: &Task) -> Task {
    let mut variables = task.variables.clone();
    let id = variables.len();
    variables.push(var(id, "blocked", 2));
    let mut initial = task.initial.values().to_vec();
    initial.push(0);
    let mut goal = task.goal.entries().to_vec();
    goal.push((id, 1));
    Task::new(variables, task.operators.clone(), State::new(initial), pa(&goal), task.metric)
        .expect("augmented task is well-formed")
}

/// A random small task for relaxation oracle suites: at most `max_facts`
/// facts, a handful of operators with random preconditions and effects.
/// Goals may or may not be reachable.
pub fn random_small_task(rng: &mut impl Rng, max_facts: usize) -> Task {
    assert!(max_facts >= 4);
    let mut sizes = Vec::new();
    let mut facts = 0;
    while facts + 2 <= max_facts && sizes.len() < 6 {
        let size = rng.gen_range(2..=3.min(max_facts - facts));
        sizes.push(size);
        facts += size;
        if sizes.len() >= 2 && rng.gen_bool(0.3) {
            break;
        }
    }
    let n = sizes.len();
    let variables: Vec<VariableDef> =
        sizes.iter().enumerate().map(|(i, &s)| var(i, &format!("v{i}"), s)).collect();

    let num_ops = rng.gen_range(2..=8);
    let mut operators = Vec::with_capacity(num_ops);
    for k in 0..num_ops {
        let mut pre = Vec::new();
        for v in 0..n {
            if rng.gen_bool(0.35) {
                pre.push((v, rng.gen_range(0..sizes[v]) as Val));
            }
        }
        let eff_vars = rng.gen_range(1..=2.min(n));
        let mut chosen: Vec<usize> = (0..n).collect();
        for i in 0..eff_vars {
            let j = rng.gen_range(i..n);
            chosen.swap(i, j);
        }
        let eff: Vec<(Var, Val)> = chosen[..eff_vars]
            .iter()
            .map(|&v| (v, rng.gen_range(0..sizes[v]) as Val))
            .collect();
        // Drop precondition entries that clash with effect variables half of
        // the time, to vary how often operators re-assert their own effects.
        let pre: Vec<(Var, Val)> = pre
            .into_iter()
            .filter(|&(v, _)| eff.iter().all(|&(ev, _)| ev != v) || rng.gen_bool(0.5))
            .collect();
        let pre = PartialAssignment::new(pre).expect("vars unique by construction");
        let eff = PartialAssignment::new(eff).expect("vars unique by construction");
        operators.push(Operator { name: format!("op{k}"), precondition: pre, effect: eff, cost: 1 });
    }

    let initial: Vec<Val> = sizes.iter().map(|&s| rng.gen_range(0..s) as Val).collect();
    let goal_vars = rng.gen_range(1..=n);
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..goal_vars {
        let j = rng.gen_range(i..n);
        order.swap(i, j);
    }
    let goal: Vec<(Var, Val)> =
        order[..goal_vars].iter().map(|&v| (v, rng.gen_range(0..sizes[v]) as Val)).collect();

    Task::new(
        variables,
        operators,
        State::new(initial),
        PartialAssignment::new(goal).expect("goal vars unique"),
        true,
    )
    .expect("random task is well-formed")
}
