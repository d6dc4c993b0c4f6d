//! Calibration: sweep the generator size parameter until the plain-GBFS
//! solve rate at the configured timeout drops to the target (about one half),
//! the same procedure used to size the training problems.

use altplan_core::probgen::{derive_seed, generate_task, GenDomain, GenSpec};
use altplan_core::routines::{RoutineId, RoutineParams};
use altplan_core::search::{BudgetClock, BudgetMode};
use anyhow::Result;

use crate::runner::run_validated;
use crate::runner::StrategySpec;

#[derive(Debug, Clone)]
pub struct CalibrateConfig {
    pub domain: GenDomain,
    pub fuel_slack: f64,
    pub budget_mode: BudgetMode,
    pub timeout_s: f64,
    pub slice_ms: f64,
    pub timeout_expansions: u64,
    pub slice_expansions: u64,
    /// Problems sampled per size step.
    pub count: usize,
    pub seed: u64,
    pub target_rate: f64,
    pub min_size: u32,
    pub max_size: u32,
    pub step: u32,
    pub params: RoutineParams,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        Self {
            domain: GenDomain::Delivery,
            fuel_slack: 1.5,
            budget_mode: BudgetMode::WallClock,
            timeout_s: 5.0,
            slice_ms: 100.0,
            timeout_expansions: 50_000,
            slice_expansions: 300,
            count: 20,
            seed: 0,
            target_rate: 0.5,
            min_size: 2,
            max_size: 0, // 0: use the domain's upper size bound
            step: 2,
            params: RoutineParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrateRow {
    pub size: u32,
    pub solved: usize,
    pub count: usize,
}

impl CalibrateRow {
    pub fn rate(&self) -> f64 {
        self.solved as f64 / self.count as f64
    }
}

/// Sweeps sizes upward, stopping once the solve rate falls to the target.
/// Returns all measured rows plus the size whose rate came closest to the
/// target.
pub fn calibrate(cfg: &CalibrateConfig) -> Result<(Vec<CalibrateRow>, u32)> {
    assert!(cfg.count >= 1 && cfg.step >= 1);
    let clock = match cfg.budget_mode {
        BudgetMode::WallClock => BudgetClock::wall(cfg.timeout_s, cfg.slice_ms / 1000.0),
        BudgetMode::Expansions => {
            BudgetClock::expansions(cfg.timeout_expansions, cfg.slice_expansions)
        }
    };
    let max_size = if cfg.max_size == 0 { cfg.domain.size_range().1 } else { cfg.max_size };
    let gbfs = StrategySpec::Fixed(RoutineId::Gbfs);

    let mut rows = Vec::new();
    let mut size = cfg.min_size.max(cfg.domain.size_range().0);
    while size <= max_size {
        let mut solved = 0;
        for k in 0..cfg.count {
            let instance = derive_seed(cfg.seed, u64::from(size) << 32 | k as u64);
            let spec =
                GenSpec::new(cfg.domain, size, instance).with_fuel_slack(cfg.fuel_slack);
            let task = generate_task(&spec)?;
            let run_seed = derive_seed(cfg.seed, 0xca11 + instance);
            let (result, _) = run_validated(&task, &gbfs, clock, &cfg.params, run_seed)?;
            if result.solved {
                solved += 1;
            }
        }
        let row = CalibrateRow { size, solved, count: cfg.count };
        let rate = row.rate();
        rows.push(row);
        if rate <= cfg.target_rate {
            break;
        }
        size += cfg.step;
    }

    let chosen = rows
        .iter()
        .min_by(|a, b| {
            let da = (a.rate() - cfg.target_rate).abs();
            let db = (b.rate() - cfg.target_rate).abs();
            da.partial_cmp(&db).unwrap()
        })
        .map(|r| r.size)
        .unwrap_or(cfg.min_size);
    Ok((rows, chosen))
}
