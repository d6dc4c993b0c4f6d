//! The shared open list: a binary heap ordered by (h, insertion serial) for
//! min-pops, synchronized with a dense array for O(1) uniform random pops.
//!
//! Heap entries are removed lazily (a popped entry is skipped unless the
//! node is still a member); the sampling array is kept exact via swap-removal
//! with per-node position tracking, so uniform sampling never sees stale
//! entries.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;

use super::{NodeId, SearchNode};

const NOT_POOLED: usize = usize::MAX;

#[derive(Debug, Clone, Default)]
pub struct OpenList {
    heap: BinaryHeap<Reverse<(u32, NodeId)>>,
    pool: Vec<NodeId>,
    pool_pos: Vec<usize>,
}

impl OpenList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pool.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty()
    }

    pub fn push(&mut self, nodes: &mut [SearchNode], id: NodeId) {
        debug_assert!(!nodes[id].expanded, "pushed an expanded node");
        debug_assert!(!nodes[id].in_global, "node is already queued");
        nodes[id].in_global = true;
        self.heap.push(Reverse((nodes[id].h, id)));
        if self.pool_pos.len() <= id {
            self.pool_pos.resize(id + 1, NOT_POOLED);
        }
        self.pool_pos[id] = self.pool.len();
        self.pool.push(id);
    }

    fn remove_from_pool(&mut self, id: NodeId) {
        let at = self.pool_pos[id];
        debug_assert_ne!(at, NOT_POOLED);
        self.pool.swap_remove(at);
        if at < self.pool.len() {
            self.pool_pos[self.pool[at]] = at;
        }
        self.pool_pos[id] = NOT_POOLED;
    }

    /// Pops the member with the lowest (h, serial) key.
    pub fn pop_min(&mut self, nodes: &mut [SearchNode]) -> Option<NodeId> {
        while let Some(Reverse((_, id))) = self.heap.pop() {
            if !nodes[id].in_global {
                continue; // lazily dropped
            }
            nodes[id].in_global = false;
            self.remove_from_pool(id);
            return Some(id);
        }
        None
    }

    /// Pops a member chosen uniformly at random.
    pub fn sample_uniform(
        &mut self,
        nodes: &mut [SearchNode],
        rng: &mut impl Rng,
    ) -> Option<NodeId> {
        if self.pool.is_empty() {
            return None;
        }
        let id = self.pool[rng.gen_range(0..self.pool.len())];
        debug_assert!(nodes[id].in_global);
        nodes[id].in_global = false;
        self.remove_from_pool(id);
        Some(id)
    }

    /// Removes a node that is being expanded through another structure
    /// (a DFS stack can hold nodes that are also queued here).
    pub fn detach(&mut self, nodes: &mut [SearchNode], id: NodeId) {
        debug_assert!(nodes[id].in_global);
        nodes[id].in_global = false;
        self.remove_from_pool(id);
    }
}
