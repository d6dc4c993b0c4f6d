//! Orchestration around the planner core: training and evaluation loops,
//! reference-cost caching, policy persistence, generator batch runs and the
//! report writers behind the `altplan` binary.

pub mod calibrate;
pub mod config;
pub mod evaluate;
pub mod policy_file;
pub mod refcache;
pub mod report;
pub mod runner;
pub mod train;
