//! Test-only oracles for the altplan suites: brute-force search and
//! relaxation references, scripted micro-tasks with known structure, random
//! task generation and small statistics helpers.
//!
//! Everything here is deliberately written from first principles, independent
//! of the production search and heuristic code paths it is used to check.
//! Keep it that way: these modules may use `altplan_core::task` (the shared
//! data model) but nothing else from the core crate.

pub mod exhaustive;
pub mod reference;
pub mod relaxation;
pub mod stats;
pub mod tasks;
