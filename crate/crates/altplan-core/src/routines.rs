//! The five search routines. Each step is one atomic unit of its algorithm
//! on the shared [`PlannerState`], plus an end-of-slice hook that returns any
//! privately held nodes to the global open list (or drops them when they are
//! already queued there).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::search::{NodeId, PickRule, PlannerState, RoutineOutcome};

/// The selectable routines, in the fixed encoding used by the policy table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoutineId {
    Gbfs,
    EpsGreedy,
    RwGbfs,
    LocalSearch,
    HeuristicDfs,
}

impl RoutineId {
    pub const COUNT: usize = 5;
    pub const ALL: [RoutineId; 5] = [
        RoutineId::Gbfs,
        RoutineId::EpsGreedy,
        RoutineId::RwGbfs,
        RoutineId::LocalSearch,
        RoutineId::HeuristicDfs,
    ];

    pub fn index(self) -> usize {
        match self {
            RoutineId::Gbfs => 0,
            RoutineId::EpsGreedy => 1,
            RoutineId::RwGbfs => 2,
            RoutineId::LocalSearch => 3,
            RoutineId::HeuristicDfs => 4,
        }
    }

    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }

    pub fn name(self) -> &'static str {
        match self {
            RoutineId::Gbfs => "gbfs",
            RoutineId::EpsGreedy => "eps-greedy",
            RoutineId::RwGbfs => "rw-gbfs",
            RoutineId::LocalSearch => "local",
            RoutineId::HeuristicDfs => "dfs",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }
}

/// Tunables of the routines themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoutineParams {
    /// Probability of a uniform random pop in epsilon-greedy search.
    pub epsilon: f64,
    /// Non-improving expansions tolerated before a random walk fires.
    pub stall_s: u32,
    /// Maximum random-walk length.
    pub walk_len_l: u32,
}

impl Default for RoutineParams {
    fn default() -> Self {
        Self { epsilon: 0.2, stall_s: 5, walk_len_l: 20 }
    }
}

/// Routine-private state. Only the structure of the routine currently
/// holding the slice is ever non-empty.
#[derive(Debug, Clone, Default)]
pub struct LocalState {
    local_queue: BinaryHeap<Reverse<(u32, NodeId)>>,
    stack: Vec<NodeId>,
    /// Expansions since `h_best` last improved (random-walk trigger).
    pub stall_counter: u32,
}

impl LocalState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Nodes held privately: local-search queue plus DFS stack.
    pub fn node_count(&self) -> usize {
        self.local_queue.len() + self.stack.len()
    }

    pub fn local_queue_len(&self) -> usize {
        self.local_queue.len()
    }

    pub fn stack_len(&self) -> usize {
        self.stack.len()
    }
}

/// Applies one step of `routine`.
pub fn step(
    routine: RoutineId,
    ps: &mut PlannerState<'_>,
    local: &mut LocalState,
    params: &RoutineParams,
) -> RoutineOutcome {
    match routine {
        RoutineId::Gbfs => step_gbfs(ps),
        RoutineId::EpsGreedy => step_eps_greedy(ps, params),
        RoutineId::RwGbfs => step_rw_gbfs(ps, params, local),
        RoutineId::LocalSearch => step_local(ps, local),
        RoutineId::HeuristicDfs => step_dfs(ps, local),
    }
}

/// Slice-boundary hook for `routine`.
pub fn end_slice(routine: RoutineId, ps: &mut PlannerState<'_>, local: &mut LocalState) {
    match routine {
        RoutineId::LocalSearch => end_slice_local(ps, local),
        // DFS children were also inserted into the global queue, so the
        // stack can be dropped without losing nodes.
        RoutineId::HeuristicDfs => local.stack.clear(),
        RoutineId::RwGbfs => local.stall_counter = 0,
        RoutineId::Gbfs | RoutineId::EpsGreedy => {}
    }
}

/// Plain greedy best-first search: expand the node with the lowest h.
pub fn step_gbfs(ps: &mut PlannerState<'_>) -> RoutineOutcome {
    ps.expand_best(PickRule::MinH)
}

/// With probability epsilon, expand a node drawn uniformly from the whole
/// open list; otherwise expand the lowest-h node. With `epsilon == 0` this
/// consumes no randomness and is identical to [`step_gbfs`].
pub fn step_eps_greedy(ps: &mut PlannerState<'_>, params: &RoutineParams) -> RoutineOutcome {
    let explore = params.epsilon > 0.0 && ps.rng.gen::<f64>() < params.epsilon;
    ps.expand_best(if explore { PickRule::UniformRandom } else { PickRule::MinH })
}

/// Greedy best-first search that answers search stagnation with a random
/// walk: after `stall_s` consecutive expansions without an `h_best`
/// improvement, one walk of up to `walk_len_l` uniformly random operator
/// applications runs from the node just expanded. Newly visited walk states
/// are queued globally; the walk stops early at a state with h below the
/// start node's h, at a goal, or when no operator applies.
pub fn step_rw_gbfs(
    ps: &mut PlannerState<'_>,
    params: &RoutineParams,
    local: &mut LocalState,
) -> RoutineOutcome {
    let h_before = ps.h_best;
    let Some(id) = ps.pop(PickRule::MinH) else {
        return RoutineOutcome::Exhausted;
    };
    let mut children = Vec::new();
    match ps.expand_collect(id, &mut children) {
        RoutineOutcome::InProgress => {}
        terminal => return terminal,
    }
    for child in children {
        ps.push_global(child);
    }

    if ps.h_best < h_before {
        local.stall_counter = 0;
    } else {
        local.stall_counter += 1;
    }
    if local.stall_counter >= params.stall_s {
        let outcome = random_walk(ps, id, params.walk_len_l);
        local.stall_counter = 0;
        return outcome;
    }
    RoutineOutcome::InProgress
}

fn random_walk(ps: &mut PlannerState<'_>, from: NodeId, max_len: u32) -> RoutineOutcome {
    ps.stats.walks += 1;
    let start_h = ps.node(from).h;
    let mut cur = from;
    for _ in 0..max_len {
        let state = ps.node(cur).state.clone();
        let applicable = ps.task.applicable_operators(&state);
        if applicable.is_empty() {
            break;
        }
        let op_index = applicable[ps.rng.gen_range(0..applicable.len())];
        let next = ps.task.operators[op_index].apply(&state);
        ps.stats.walk_steps += 1;
        if let Some(existing) = ps.closed_id(&next) {
            // Already seen: skip insertion but keep walking through it.
            if ps.node(existing).h < start_h {
                break;
            }
            cur = existing;
            continue;
        }
        let node = ps.add_node(next, Some(cur), Some(op_index));
        ps.push_global(node);
        if ps.task.goal_satisfied(&ps.node(node).state) {
            return RoutineOutcome::PlanFound(ps.extract_plan(node));
        }
        if ps.node(node).h < start_h {
            break;
        }
        cur = node;
    }
    RoutineOutcome::InProgress
}

/// Local search: a private queue seeded with the best global node when
/// empty; expansions stay within the private queue until the slice ends.
pub fn step_local(ps: &mut PlannerState<'_>, local: &mut LocalState) -> RoutineOutcome {
    if local.local_queue.is_empty() {
        let Some(seed) = ps.pop(PickRule::MinH) else {
            return RoutineOutcome::Exhausted;
        };
        local.local_queue.push(Reverse((ps.node(seed).h, seed)));
    }
    let Reverse((_, id)) = local.local_queue.pop().expect("seeded above");
    let mut children = Vec::new();
    match ps.expand_collect(id, &mut children) {
        RoutineOutcome::InProgress => {}
        terminal => return terminal,
    }
    for child in children {
        local.local_queue.push(Reverse((ps.node(child).h, child)));
    }
    RoutineOutcome::InProgress
}

/// Merges the private local-search queue back into the global open list.
/// Nodes keep their insertion serials, so tie-breaking is unaffected.
pub fn end_slice_local(ps: &mut PlannerState<'_>, local: &mut LocalState) {
    while let Some(Reverse((_, id))) = local.local_queue.pop() {
        ps.push_global(id);
    }
}

/// Heuristic-guided depth-first search on a private stack. Children are
/// pushed in decreasing-h order (the best child ends on top) and are also
/// inserted into the global open list.
pub fn step_dfs(ps: &mut PlannerState<'_>, local: &mut LocalState) -> RoutineOutcome {
    if local.stack.is_empty() {
        let Some(seed) = ps.pop(PickRule::MinH) else {
            return RoutineOutcome::Exhausted;
        };
        local.stack.push(seed);
    }
    let id = local.stack.pop().expect("seeded above");
    let mut children = Vec::new();
    match ps.expand_collect(id, &mut children) {
        RoutineOutcome::InProgress => {}
        terminal => return terminal,
    }
    children.sort_unstable_by(|&a, &b| {
        ps.node(b).h.cmp(&ps.node(a).h).then_with(|| b.cmp(&a))
    });
    for &child in &children {
        local.stack.push(child);
    }
    for &child in &children {
        ps.push_global(child);
    }
    RoutineOutcome::InProgress
}
