//! Shared planner state, node-expansion semantics and the alternation loop
//! that slices the budget among the search routines.
//!
//! All routines operate on one [`PlannerState`]: a global open list, a closed
//! map holding every state ever generated, the best heuristic value seen and
//! the expansion counters. Node insertion serials are the arena indices, so
//! merged nodes keep their original tie-breaking position.

mod budget;
mod open_list;

pub use budget::{BudgetClock, BudgetMode, DEFAULT_EXPANSION_SLICE, DEFAULT_WALL_SLICE_SECS};
pub use open_list::OpenList;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::heuristic::{RelaxationWorkspace, INFINITE_H};
use crate::routines::{self, LocalState, RoutineId, RoutineParams};
use crate::strategy::{featurize, EpisodeRecord, RoutineSelector, SearchFeature};
use crate::task::{validate_plan, Plan, State, Task};

/// Arena index of a search node; doubles as the insertion serial.
pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub state: State,
    /// Heuristic value, computed once at generation time.
    pub h: u32,
    /// Absent exactly for the initial node.
    pub parent: Option<NodeId>,
    pub achieving_op: Option<usize>,
    pub(crate) in_global: bool,
    pub(crate) expanded: bool,
}

/// How the next node is drawn from the global open list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PickRule {
    MinH,
    UniformRandom,
}

/// Result of applying one routine step.
#[derive(Debug, Clone, PartialEq)]
pub enum RoutineOutcome {
    InProgress,
    PlanFound(Plan),
    Exhausted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: u64,
    pub generated: u64,
    pub walks: u64,
    pub walk_steps: u64,
}

/// The search workspace shared by every routine.
#[derive(Clone)]
pub struct PlannerState<'t> {
    pub task: &'t Task,
    pub(crate) nodes: Vec<SearchNode>,
    pub(crate) open: OpenList,
    closed: HashMap<State, NodeId>,
    /// Lowest heuristic value over all generated nodes.
    pub h_best: u32,
    /// Heuristic value of the initial state.
    pub h0: u32,
    pub stats: SearchStats,
    workspace: RelaxationWorkspace,
    pub(crate) rng: ChaCha8Rng,
    expansion_trace: Vec<NodeId>,
}

impl<'t> PlannerState<'t> {
    /// Evaluates the initial state and queues the initial node. An infinite
    /// initial heuristic (`h0 == INFINITE_H`) is left for the caller to
    /// handle.
    pub fn new(task: &'t Task, seed: u64) -> Self {
        let workspace = RelaxationWorkspace::new(task);
        let mut ps = Self {
            task,
            nodes: Vec::new(),
            open: OpenList::new(),
            closed: HashMap::new(),
            h_best: INFINITE_H,
            h0: INFINITE_H,
            stats: SearchStats::default(),
            workspace,
            rng: ChaCha8Rng::seed_from_u64(seed),
            expansion_trace: Vec::new(),
        };
        let root = ps.add_node(task.initial.clone(), None, None);
        ps.h0 = ps.nodes[root].h;
        ps.push_global(root);
        ps
    }

    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn open_len(&self) -> usize {
        self.open.len()
    }

    /// Node ids in the order they were expanded.
    pub fn expansion_trace(&self) -> &[NodeId] {
        &self.expansion_trace
    }

    /// States in the order they were expanded.
    pub fn expanded_states(&self) -> Vec<State> {
        self.expansion_trace.iter().map(|&id| self.nodes[id].state.clone()).collect()
    }

    pub fn closed_id(&self, state: &State) -> Option<NodeId> {
        self.closed.get(state).copied()
    }

    /// Creates a node for an unseen state: evaluates the heuristic, records
    /// the state as seen and updates `h_best`. The node is not queued.
    pub(crate) fn add_node(
        &mut self,
        state: State,
        parent: Option<NodeId>,
        achieving_op: Option<usize>,
    ) -> NodeId {
        debug_assert!(!self.closed.contains_key(&state), "duplicate state generated");
        let h = self.workspace.h_ff(&state);
        let id = self.nodes.len();
        self.closed.insert(state.clone(), id);
        self.nodes.push(SearchNode {
            state,
            h,
            parent,
            achieving_op,
            in_global: false,
            expanded: false,
        });
        self.stats.generated += 1;
        if h < self.h_best {
            self.h_best = h;
        }
        id
    }

    pub(crate) fn push_global(&mut self, id: NodeId) {
        self.open.push(&mut self.nodes, id);
    }

    pub(crate) fn pop(&mut self, rule: PickRule) -> Option<NodeId> {
        match rule {
            PickRule::MinH => self.open.pop_min(&mut self.nodes),
            PickRule::UniformRandom => self.open.sample_uniform(&mut self.nodes, &mut self.rng),
        }
    }

    /// Goal-tests `id`; if it is no goal, generates all applicable
    /// successors not seen before, appending the new node ids to `out`
    /// without queueing them anywhere.
    pub(crate) fn expand_collect(
        &mut self,
        id: NodeId,
        out: &mut Vec<NodeId>,
    ) -> RoutineOutcome {
        debug_assert!(!self.nodes[id].expanded, "node expanded twice");
        if self.nodes[id].in_global {
            // Held by both the global queue and a routine-local structure.
            self.open.detach(&mut self.nodes, id);
        }
        if self.task.goal_satisfied(&self.nodes[id].state) {
            return RoutineOutcome::PlanFound(self.extract_plan(id));
        }
        self.nodes[id].expanded = true;
        self.stats.expansions += 1;
        self.expansion_trace.push(id);

        let task = self.task;
        let state = self.nodes[id].state.clone();
        for (i, op) in task.operators.iter().enumerate() {
            if !op.applicable_in(&state) {
                continue;
            }
            let next = op.apply(&state);
            if self.closed.contains_key(&next) {
                continue;
            }
            let child = self.add_node(next, Some(id), Some(i));
            out.push(child);
        }
        RoutineOutcome::InProgress
    }

    /// One expansion driven by the global open list: pops a node per `rule`,
    /// goal-tests it and queues all new successors back into the global
    /// list. `Exhausted` when the list is empty.
    pub fn expand_best(&mut self, rule: PickRule) -> RoutineOutcome {
        let Some(id) = self.pop(rule) else {
            return RoutineOutcome::Exhausted;
        };
        let mut children = Vec::new();
        let outcome = self.expand_collect(id, &mut children);
        for child in children {
            self.push_global(child);
        }
        outcome
    }

    /// Path from the initial node to `id` via parent links.
    pub fn extract_plan(&self, id: NodeId) -> Plan {
        let mut steps = Vec::new();
        let mut cur = id;
        while let Some(op) = self.nodes[cur].achieving_op {
            steps.push(op);
            cur = self.nodes[cur].parent.expect("node with an achieving op but no parent");
        }
        steps.reverse();
        Plan::from_steps(self.task, steps).expect("extracted plan references valid operators")
    }

    /// Every generated node must be expanded or sit in exactly one
    /// structure. Valid at slice boundaries, after the end-of-slice hooks.
    pub(crate) fn debug_check_conservation(&self, local: &LocalState) {
        debug_assert_eq!(
            self.nodes.len() as u64,
            self.stats.expansions + self.open.len() as u64 + local.node_count() as u64,
            "node conservation violated at slice boundary"
        );
    }
}

/// Final verdict of an alternating-search run.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanOutcome {
    Solved(Plan),
    /// The reachable space was exhausted without a plan; on tasks with a
    /// dead-end initial state this is returned immediately.
    Exhausted,
    Timeout,
}

impl PlanOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            PlanOutcome::Solved(p) => Some(p),
            _ => None,
        }
    }
}

/// Everything observable about one planning episode.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub outcome: PlanOutcome,
    pub episode: EpisodeRecord,
    pub stats: SearchStats,
    /// One entry per slice: the feature seen and the routine chosen.
    pub routine_trace: Vec<(SearchFeature, RoutineId)>,
}

enum SliceEnd {
    Plan(Plan),
    Exhausted,
    TotalBudget,
    SliceOver,
}

/// Runs the alternating-search loop: featurize, let the selector choose a
/// routine, apply that routine step by step until the slice expires or it
/// reports a terminal outcome, run its end-of-slice hook, repeat. Slice and
/// budget expiry are only checked between steps.
pub fn plan_asr(
    task: &Task,
    selector: &mut dyn RoutineSelector,
    budget: BudgetClock,
    params: &RoutineParams,
    seed: u64,
) -> SearchReport {
    let mut budget = budget;
    budget.start();
    let mut ps = PlannerState::new(task, seed);
    let mut episode = EpisodeRecord::new();
    let mut routine_trace = Vec::new();

    if ps.h0 == INFINITE_H {
        // Dead-end initial state: nothing to search.
        return SearchReport {
            outcome: PlanOutcome::Exhausted,
            episode,
            stats: ps.stats,
            routine_trace,
        };
    }

    let mut local = LocalState::new();
    let outcome = loop {
        let feature =
            featurize(ps.h_best, ps.h0, budget.elapsed(ps.stats.expansions), budget.t_max());
        let routine = selector.select(feature);
        episode.record_selection(feature, routine);
        routine_trace.push((feature, routine));

        let slice_mark = budget.elapsed(ps.stats.expansions);
        let end = loop {
            match routines::step(routine, &mut ps, &mut local, params) {
                RoutineOutcome::PlanFound(plan) => break SliceEnd::Plan(plan),
                RoutineOutcome::Exhausted => break SliceEnd::Exhausted,
                RoutineOutcome::InProgress => {}
            }
            if budget.total_expired(ps.stats.expansions) {
                break SliceEnd::TotalBudget;
            }
            if budget.slice_expired(slice_mark, ps.stats.expansions) {
                break SliceEnd::SliceOver;
            }
        };
        routines::end_slice(routine, &mut ps, &mut local);

        match end {
            SliceEnd::Plan(plan) => break PlanOutcome::Solved(plan),
            SliceEnd::Exhausted => {
                debug_assert!(ps.open_len() == 0 && local.node_count() == 0);
                break PlanOutcome::Exhausted;
            }
            SliceEnd::TotalBudget => {
                ps.debug_check_conservation(&local);
                break PlanOutcome::Timeout;
            }
            SliceEnd::SliceOver => ps.debug_check_conservation(&local),
        }
    };

    episode.time_used = budget.elapsed(ps.stats.expansions).min(budget.t_max());
    if let PlanOutcome::Solved(plan) = &outcome {
        episode.solved = true;
        episode.plan_cost = Some(plan.cost);
        debug_assert!(
            validate_plan(task, plan).map(|c| c.is_valid()).unwrap_or(false),
            "planner returned an invalid plan"
        );
    }
    SearchReport { outcome, episode, stats: ps.stats, routine_trace }
}
