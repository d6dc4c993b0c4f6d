//! Search budgets: total allowance and slice length, in wall-clock seconds
//! or expansion counts.
//!
//! Wall-clock mode matches how the planner is meant to be deployed and
//! trained; expansion mode makes runs bit-reproducible and is the default in
//! the test suites. Budget units are surfaced as `f64` either way so the rest
//! of the planner never branches on the mode.

use std::time::Instant;

/// Default slice length in wall-clock mode: 100 ms.
pub const DEFAULT_WALL_SLICE_SECS: f64 = 0.1;
/// Default slice length in expansion mode.
pub const DEFAULT_EXPANSION_SLICE: u64 = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetMode {
    WallClock,
    Expansions,
}

#[derive(Debug, Clone, Copy)]
pub struct BudgetClock {
    mode: BudgetMode,
    t_max: f64,
    slice: f64,
    started: Option<Instant>,
}

impl BudgetClock {
    /// Wall-clock budget of `t_max_secs` with slices of `slice_secs`.
    pub fn wall(t_max_secs: f64, slice_secs: f64) -> Self {
        assert!(t_max_secs > 0.0 && slice_secs > 0.0);
        Self { mode: BudgetMode::WallClock, t_max: t_max_secs, slice: slice_secs, started: None }
    }

    /// Expansion-count budget of `t_max` with slices of `slice` expansions.
    pub fn expansions(t_max: u64, slice: u64) -> Self {
        assert!(t_max > 0 && slice > 0);
        Self {
            mode: BudgetMode::Expansions,
            t_max: t_max as f64,
            slice: slice as f64,
            started: None,
        }
    }

    pub fn mode(&self) -> BudgetMode {
        self.mode
    }

    /// (Re)starts the wall clock. A no-op in expansion mode.
    pub fn start(&mut self) {
        self.started = Some(Instant::now());
    }

    /// Budget units consumed so far: seconds or `expansions`.
    pub fn elapsed(&self, expansions: u64) -> f64 {
        match self.mode {
            BudgetMode::WallClock => {
                self.started.map_or(0.0, |t| t.elapsed().as_secs_f64())
            }
            BudgetMode::Expansions => expansions as f64,
        }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn slice_len(&self) -> f64 {
        self.slice
    }

    pub fn total_expired(&self, expansions: u64) -> bool {
        self.elapsed(expansions) >= self.t_max
    }

    pub fn slice_expired(&self, slice_mark: f64, expansions: u64) -> bool {
        self.elapsed(expansions) - slice_mark >= self.slice
    }
}
