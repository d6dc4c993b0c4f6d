//! Evaluation runs: every planner (the five single-routine baselines, the
//! uniform policy and any trained policies) against every problem, repeated
//! with fresh seeds, scored per metric and averaged over repeats.

use std::path::PathBuf;

use altplan_core::probgen::derive_seed;
use altplan_core::routines::RoutineParams;
use altplan_core::scoring::{eval_scores, Metric, RunResult, ScoreTable};
use altplan_core::search::{BudgetClock, BudgetMode, DEFAULT_EXPANSION_SLICE};
use anyhow::Result;

use crate::config::TrainConfig;
use crate::runner::{load_problem_dir, reference_strategies, run_validated, StrategySpec};

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub problems: PathBuf,
    /// Trained policies to evaluate besides the built-in baselines.
    pub policies: Vec<PathBuf>,
    pub metrics: Vec<Metric>,
    pub repeats: usize,
    pub budget_mode: BudgetMode,
    pub timeout_s: f64,
    pub slice_ms: f64,
    pub timeout_expansions: u64,
    pub slice_expansions: u64,
    pub seed: u64,
    pub params: RoutineParams,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            problems: PathBuf::new(),
            policies: Vec::new(),
            metrics: Metric::ALL.to_vec(),
            repeats: 10,
            budget_mode: BudgetMode::WallClock,
            timeout_s: 5.0,
            slice_ms: 100.0,
            timeout_expansions: 50_000,
            slice_expansions: DEFAULT_EXPANSION_SLICE,
            seed: 0,
            params: RoutineParams::default(),
        }
    }
}

impl EvalConfig {
    /// Carries the shared run settings over from a training config.
    pub fn from_train(cfg: &TrainConfig) -> Self {
        Self {
            problems: cfg.problems.clone(),
            budget_mode: cfg.budget_mode,
            timeout_s: cfg.timeout_s,
            slice_ms: cfg.slice_ms,
            timeout_expansions: cfg.timeout_expansions,
            slice_expansions: cfg.slice_expansions,
            seed: cfg.seed,
            params: cfg.params,
            ..Self::default()
        }
    }

    fn clock(&self) -> BudgetClock {
        match self.budget_mode {
            BudgetMode::WallClock => BudgetClock::wall(self.timeout_s, self.slice_ms / 1000.0),
            BudgetMode::Expansions => {
                BudgetClock::expansions(self.timeout_expansions, self.slice_expansions)
            }
        }
    }

    pub fn t_max_units(&self) -> f64 {
        match self.budget_mode {
            BudgetMode::WallClock => self.timeout_s,
            BudgetMode::Expansions => self.timeout_expansions as f64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalOutput {
    pub planners: Vec<String>,
    pub problems: Vec<String>,
    pub repeats: usize,
    pub t_max: f64,
    /// Mean score tables over the repeats, one per requested metric.
    pub tables: Vec<(Metric, ScoreTable)>,
    /// Mean number of solved problems per planner.
    pub coverage: Vec<f64>,
}

impl EvalOutput {
    pub fn total(&self, metric: Metric, planner: &str) -> Option<f64> {
        let row = self.planners.iter().position(|p| p == planner)?;
        let table = self.tables.iter().find(|(m, _)| *m == metric)?;
        Some(table.1.totals[row])
    }
}

/// The planner lineup: five single-routine baselines, the uniform policy,
/// then the supplied trained policies in order.
pub fn planner_lineup(policies: &[PathBuf]) -> Result<Vec<StrategySpec>> {
    let mut lineup = reference_strategies();
    lineup.push(StrategySpec::Uniform);
    for path in policies {
        lineup.push(StrategySpec::parse(path.to_string_lossy().as_ref())?);
    }
    Ok(lineup)
}

pub fn evaluate(cfg: &EvalConfig) -> Result<EvalOutput> {
    assert!(cfg.repeats >= 1, "repeats must be at least 1");
    let problems = load_problem_dir(&cfg.problems)?;
    let lineup = planner_lineup(&cfg.policies)?;
    let planner_names: Vec<String> = lineup.iter().map(StrategySpec::display_name).collect();

    let num_planners = lineup.len();
    let num_problems = problems.len();
    let mut mean_tables: Vec<(Metric, ScoreTable)> = cfg
        .metrics
        .iter()
        .map(|&m| {
            (m, ScoreTable {
                per_problem: vec![vec![0.0; num_problems]; num_planners],
                totals: vec![0.0; num_planners],
            })
        })
        .collect();
    let mut coverage = vec![0.0; num_planners];

    for repeat in 0..cfg.repeats {
        let mut matrix: Vec<Vec<RunResult>> = Vec::with_capacity(num_planners);
        for (pi, strategy) in lineup.iter().enumerate() {
            let mut row = Vec::with_capacity(num_problems);
            for (qi, problem) in problems.iter().enumerate() {
                let cell = ((repeat * num_planners + pi) * num_problems + qi) as u64;
                let seed = derive_seed(cfg.seed, cell);
                let (result, _) =
                    run_validated(&problem.task, strategy, cfg.clock(), &cfg.params, seed)?;
                if result.solved {
                    coverage[pi] += 1.0;
                }
                row.push(result);
            }
            matrix.push(row);
        }
        for (metric, mean) in &mut mean_tables {
            let table = eval_scores(&matrix, *metric, cfg.t_max_units());
            for p in 0..num_planners {
                for q in 0..num_problems {
                    mean.per_problem[p][q] += table.per_problem[p][q];
                }
                mean.totals[p] += table.totals[p];
            }
        }
    }

    let scale = 1.0 / cfg.repeats as f64;
    for (_, mean) in &mut mean_tables {
        for row in &mut mean.per_problem {
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
        for v in &mut mean.totals {
            *v *= scale;
        }
    }
    for v in &mut coverage {
        *v *= scale;
    }

    Ok(EvalOutput {
        planners: planner_names,
        problems: problems.iter().map(|p| p.name.clone()).collect(),
        repeats: cfg.repeats,
        t_max: cfg.t_max_units(),
        tables: mean_tables,
        coverage,
    })
}
