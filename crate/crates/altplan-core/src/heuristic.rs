//! FF-style delete-relaxation heuristic with unary operator costs.
//!
//! Fact costs are computed additively (h_add semantics) by Dijkstra-style
//! propagation over facts; a relaxed plan is then extracted by following best
//! supporters backwards from the goal facts. The heuristic value is the
//! number of distinct operators in that relaxed plan. Operator costs declared
//! by the task are ignored here: every operator counts as 1.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::task::{State, Task};

/// Sentinel for states from which the goal is unreachable in the relaxation.
pub const INFINITE_H: u32 = u32::MAX;

const NO_SUPPORTER: u32 = u32::MAX;
const UNREACHED: u64 = u64::MAX;

/// Reusable per-planner scratch space for heuristic evaluation.
///
/// Holds the task's fact/operator topology (built once) and the per-call
/// cost, supporter and counter arrays. One workspace belongs to exactly one
/// planner instance.
#[derive(Clone)]
pub struct RelaxationWorkspace {
    fact_offset: Vec<usize>,
    num_facts: usize,
    op_pre: Vec<Vec<u32>>,
    op_eff: Vec<Vec<u32>>,
    /// Operators listed per precondition fact.
    consumers: Vec<Vec<u32>>,
    no_pre_ops: Vec<u32>,
    goal_facts: Vec<u32>,

    fact_cost: Vec<u64>,
    settled: Vec<bool>,
    best_supporter: Vec<u32>,
    unsat_pre: Vec<u32>,
    op_acc: Vec<u64>,
    queue: BinaryHeap<Reverse<(u64, u32)>>,
    marked_fact: Vec<bool>,
    marked_op: Vec<bool>,
    worklist: Vec<u32>,
}

impl RelaxationWorkspace {
    pub fn new(task: &Task) -> Self {
        let mut fact_offset = Vec::with_capacity(task.num_variables());
        let mut num_facts = 0;
        for def in &task.variables {
            fact_offset.push(num_facts);
            num_facts += def.domain_size;
        }
        let fact = |var: usize, val: u16| (fact_offset[var] + val as usize) as u32;

        let num_ops = task.num_operators();
        let mut op_pre = Vec::with_capacity(num_ops);
        let mut op_eff = Vec::with_capacity(num_ops);
        let mut consumers = vec![Vec::new(); num_facts];
        let mut no_pre_ops = Vec::new();
        for (i, op) in task.operators.iter().enumerate() {
            let pre: Vec<u32> =
                op.precondition.entries().iter().map(|&(v, val)| fact(v, val)).collect();
            let eff: Vec<u32> = op.effect.entries().iter().map(|&(v, val)| fact(v, val)).collect();
            if pre.is_empty() {
                no_pre_ops.push(i as u32);
            }
            for &f in &pre {
                consumers[f as usize].push(i as u32);
            }
            op_pre.push(pre);
            op_eff.push(eff);
        }
        let goal_facts = task.goal.entries().iter().map(|&(v, val)| fact(v, val)).collect();

        Self {
            fact_offset,
            num_facts,
            op_pre,
            op_eff,
            consumers,
            no_pre_ops,
            goal_facts,
            fact_cost: vec![UNREACHED; num_facts],
            settled: vec![false; num_facts],
            best_supporter: vec![NO_SUPPORTER; num_facts],
            unsat_pre: vec![0; num_ops],
            op_acc: vec![0; num_ops],
            queue: BinaryHeap::new(),
            marked_fact: vec![false; num_facts],
            marked_op: vec![false; num_ops],
            worklist: Vec::new(),
        }
    }

    fn fire(&mut self, op: u32) {
        let candidate = self.op_acc[op as usize].saturating_add(1);
        for i in 0..self.op_eff[op as usize].len() {
            let f = self.op_eff[op as usize][i] as usize;
            if candidate < self.fact_cost[f] {
                self.fact_cost[f] = candidate;
                self.best_supporter[f] = op;
                self.queue.push(Reverse((candidate, f as u32)));
            } else if candidate == self.fact_cost[f] && op < self.best_supporter[f] {
                // Equal-cost achievers: the lowest operator index wins.
                self.best_supporter[f] = op;
            }
        }
    }

    /// Heuristic value of `state`, or [`INFINITE_H`] if some goal fact is
    /// unreachable in the delete relaxation.
    pub fn h_ff(&mut self, state: &State) -> u32 {
        debug_assert_eq!(state.len(), self.fact_offset.len());

        self.fact_cost.fill(UNREACHED);
        self.settled.fill(false);
        self.best_supporter.fill(NO_SUPPORTER);
        self.op_acc.fill(0);
        for (i, pre) in self.op_pre.iter().enumerate() {
            self.unsat_pre[i] = pre.len() as u32;
        }
        self.queue.clear();

        for (var, &val) in state.values().iter().enumerate() {
            let f = self.fact_offset[var] + val as usize;
            self.fact_cost[f] = 0;
            self.queue.push(Reverse((0, f as u32)));
        }
        for i in 0..self.no_pre_ops.len() {
            self.fire(self.no_pre_ops[i]);
        }

        while let Some(Reverse((cost, f))) = self.queue.pop() {
            let f = f as usize;
            if self.settled[f] || cost > self.fact_cost[f] {
                continue;
            }
            self.settled[f] = true;
            for i in 0..self.consumers[f].len() {
                let op = self.consumers[f][i] as usize;
                self.op_acc[op] = self.op_acc[op].saturating_add(cost);
                self.unsat_pre[op] -= 1;
                if self.unsat_pre[op] == 0 {
                    self.fire(op as u32);
                }
            }
        }

        if self.goal_facts.iter().any(|&f| self.fact_cost[f as usize] == UNREACHED) {
            return INFINITE_H;
        }

        // Relaxed plan extraction: walk best supporters back from the goal.
        self.marked_fact.fill(false);
        self.marked_op.fill(false);
        self.worklist.clear();
        self.worklist.extend_from_slice(&self.goal_facts);
        let mut plan_ops = 0u32;
        while let Some(f) = self.worklist.pop() {
            let f = f as usize;
            if self.marked_fact[f] {
                continue;
            }
            self.marked_fact[f] = true;
            if self.fact_cost[f] == 0 {
                continue;
            }
            let op = self.best_supporter[f];
            debug_assert_ne!(op, NO_SUPPORTER, "reachable non-initial fact without supporter");
            if !self.marked_op[op as usize] {
                self.marked_op[op as usize] = true;
                plan_ops += 1;
                self.worklist.extend_from_slice(&self.op_pre[op as usize]);
            }
        }
        plan_ops
    }

    pub fn num_facts(&self) -> usize {
        self.num_facts
    }
}

/// One-shot heuristic evaluation. Search code should hold a
/// [`RelaxationWorkspace`] instead of calling this per node.
pub fn h_ff(task: &Task, state: &State) -> u32 {
    RelaxationWorkspace::new(task).h_ff(state)
}

/// Heuristic value of the task's initial state.
pub fn h0_of(task: &Task) -> u32 {
    h_ff(task, &task.initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::{Operator, PartialAssignment, Task, VariableDef};

    fn binary_var(id: usize, name: &str) -> VariableDef {
        VariableDef {
            id,
            name: name.into(),
            domain_size: 2,
            value_names: vec![format!("{name}-0"), format!("{name}-1")],
        }
    }

    fn pa(entries: &[(usize, u16)]) -> PartialAssignment {
        PartialAssignment::new(entries.to_vec()).unwrap()
    }

    /// ops a: {} -> {v0=1}, b: {v0=1} -> {v1=1}, goal {v1=1}.
    fn chain_task() -> Task {
        Task::new(
            vec![binary_var(0, "v0"), binary_var(1, "v1")],
            vec![
                Operator { name: "a".into(), precondition: pa(&[]), effect: pa(&[(0, 1)]), cost: 1 },
                Operator {
                    name: "b".into(),
                    precondition: pa(&[(0, 1)]),
                    effect: pa(&[(1, 1)]),
                    cost: 1,
                },
            ],
            State::new(vec![0, 0]),
            pa(&[(1, 1)]),
            true,
        )
        .unwrap()
    }

    #[test]
    fn goal_state_has_zero_h() {
        let task = chain_task();
        assert_eq!(h_ff(&task, &State::new(vec![1, 1])), 0);
        assert_eq!(h_ff(&task, &State::new(vec![0, 1])), 0);
    }

    #[test]
    fn chain_task_h_is_two() {
        // Expected value confirmed by the brute-force relaxed-plan oracle in
        // the integration suite (tests/heuristic_oracles.rs).
        let task = chain_task();
        assert_eq!(h_ff(&task, &task.initial), 2);
        assert_eq!(h0_of(&task), 2);
    }

    #[test]
    fn unreachable_goal_is_infinite() {
        // No operator ever touches v1.
        let task = Task::new(
            vec![binary_var(0, "v0"), binary_var(1, "v1")],
            vec![Operator {
                name: "a".into(),
                precondition: pa(&[]),
                effect: pa(&[(0, 1)]),
                cost: 1,
            }],
            State::new(vec![0, 0]),
            pa(&[(1, 1)]),
            true,
        )
        .unwrap();
        assert_eq!(h0_of(&task), INFINITE_H);
        assert_eq!(h_ff(&task, &State::new(vec![1, 0])), INFINITE_H);
    }

    #[test]
    fn supporter_tie_break_prefers_lowest_operator_index() {
        // Two achievers of the goal fact at equal cost; the extracted plan
        // must route through the lower-indexed one plus its enabler.
        let task = Task::new(
            vec![binary_var(0, "k0"), binary_var(1, "k1"), binary_var(2, "g")],
            vec![
                Operator { name: "k0".into(), precondition: pa(&[]), effect: pa(&[(0, 1)]), cost: 1 },
                Operator { name: "k1".into(), precondition: pa(&[]), effect: pa(&[(1, 1)]), cost: 1 },
                Operator {
                    name: "g-via-k0".into(),
                    precondition: pa(&[(0, 1)]),
                    effect: pa(&[(2, 1)]),
                    cost: 1,
                },
                Operator {
                    name: "g-via-k1".into(),
                    precondition: pa(&[(1, 1)]),
                    effect: pa(&[(2, 1)]),
                    cost: 1,
                },
            ],
            State::new(vec![0, 0, 0]),
            pa(&[(2, 1)]),
            true,
        )
        .unwrap();
        let mut ws = RelaxationWorkspace::new(&task);
        assert_eq!(ws.h_ff(&task.initial), 2);
        // From a state where only k1 is already true, the k1 route is free
        // of charge for its enabler and the plan shrinks to one operator.
        assert_eq!(ws.h_ff(&State::new(vec![0, 1, 0])), 1);
    }

    #[test]
    fn workspace_reuse_matches_fresh_evaluation() {
        let task = chain_task();
        let mut ws = RelaxationWorkspace::new(&task);
        let states =
            [State::new(vec![0, 0]), State::new(vec![1, 0]), State::new(vec![1, 1])];
        for s in &states {
            assert_eq!(ws.h_ff(s), h_ff(&task, s));
        }
        for s in &states {
            assert_eq!(ws.h_ff(s), h_ff(&task, s));
        }
    }
}
