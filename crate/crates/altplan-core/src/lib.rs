//! A satisficing forward-search planner for grounded finite-domain tasks.
//!
//! Instead of committing to a single search algorithm, the planner alternates
//! between five routines (greedy best-first search, epsilon-greedy search,
//! greedy search with random walks, local search and heuristic-guided
//! depth-first search) that all operate on one shared open list and closed
//! set. Which routine runs next is decided at fixed slice boundaries by a
//! selection strategy: a fixed routine, a uniform random choice, or a tabular
//! softmax policy over a coarse search-state feature. The policy can be
//! trained with batched REINFORCE against IPC-score, squared-IPC-score or
//! time-based rewards.
//!
//! Crate layout:
//! - [`task`]: task representation, operator semantics, plan validation
//! - [`sas`]: reading/writing the supported SAS v3 subset
//! - [`heuristic`]: FF-style delete-relaxation heuristic with unary costs
//! - [`search`]: shared planner state, expansion semantics, alternation loop
//! - [`routines`]: the five search routines and their slice-boundary hooks
//! - [`strategy`]: search-state features, softmax policy, REINFORCE update
//! - [`scoring`]: training rewards and evaluation score tables
//! - [`probgen`]: seeded generators for three benchmark domains

pub mod heuristic;
pub mod probgen;
pub mod routines;
pub mod sas;
pub mod scoring;
pub mod search;
pub mod strategy;
pub mod task;

pub use task::{Plan, PlanCheck, State, Task};
