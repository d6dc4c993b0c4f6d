//! Shared machinery for running one planner on one task: strategy
//! specifications, problem-set loading and validated run results.

use std::fs;
use std::path::{Path, PathBuf};

use altplan_core::routines::{RoutineId, RoutineParams};
use altplan_core::sas::parse_task;
use altplan_core::scoring::RunResult;
use altplan_core::search::{plan_asr, BudgetClock, PlanOutcome, SearchReport};
use altplan_core::strategy::{FixedRoutine, Policy, RoutineSelector};
use altplan_core::task::{validate_plan, PlanCheck, Task};
use anyhow::{bail, Context, Result};

use crate::policy_file::PolicyFile;

/// How the planner picks routines: one routine forever, the uniform random
/// policy, or a trained policy loaded from a file.
#[derive(Debug, Clone)]
pub enum StrategySpec {
    Fixed(RoutineId),
    Uniform,
    Trained { name: String, file: PolicyFile },
}

impl StrategySpec {
    /// Accepts a routine name, `uniform`, or a policy-file path.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(routine) = RoutineId::parse(spec) {
            return Ok(StrategySpec::Fixed(routine));
        }
        if spec == "uniform" {
            return Ok(StrategySpec::Uniform);
        }
        let path = Path::new(spec);
        let file = PolicyFile::load(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        Ok(StrategySpec::Trained { name, file })
    }

    pub fn display_name(&self) -> String {
        match self {
            StrategySpec::Fixed(r) => r.name().to_string(),
            StrategySpec::Uniform => "uniform".to_string(),
            StrategySpec::Trained { name, .. } => name.clone(),
        }
    }

    /// Builds a selector with its own RNG stream for one run.
    pub fn selector(&self, seed: u64) -> Box<dyn RoutineSelector> {
        match self {
            StrategySpec::Fixed(r) => Box::new(FixedRoutine(*r)),
            StrategySpec::Uniform => Box::new(Policy::uniform(seed)),
            StrategySpec::Trained { file, .. } => Box::new(Policy::from_theta(file.theta, seed)),
        }
    }
}

/// The five single-routine reference planners.
pub fn reference_strategies() -> Vec<StrategySpec> {
    RoutineId::ALL.into_iter().map(StrategySpec::Fixed).collect()
}

/// One problem: its parsed task plus the raw bytes (for cache keys).
pub struct Problem {
    pub name: String,
    pub path: PathBuf,
    pub bytes: Vec<u8>,
    pub task: Task,
}

/// Loads every `.sas` file of a directory, sorted by file name.
pub fn load_problem_dir(dir: &Path) -> Result<Vec<Problem>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading problem directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "sas"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .sas files in {}", dir.display());
    }
    paths
        .into_iter()
        .map(|path| {
            let bytes =
                fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            let text = String::from_utf8(bytes.clone())
                .with_context(|| format!("{} is not UTF-8", path.display()))?;
            let task =
                parse_task(&text).with_context(|| format!("parsing {}", path.display()))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(Problem { name, path, bytes, task })
        })
        .collect()
}

/// Runs one episode under an existing selector (whose RNG stream carries
/// over between calls) and converts it into a validated [`RunResult`]. A
/// plan that fails validation is an internal planner bug and aborts the
/// caller.
pub fn run_selector_validated(
    task: &Task,
    selector: &mut dyn RoutineSelector,
    clock: BudgetClock,
    params: &RoutineParams,
    seed: u64,
    planner_name: &str,
) -> Result<(RunResult, SearchReport)> {
    let report = plan_asr(task, selector, clock, params, seed);
    let result = match &report.outcome {
        PlanOutcome::Solved(plan) => match validate_plan(task, plan)? {
            PlanCheck::Valid { cost } => RunResult::solved(cost, report.episode.time_used),
            check => bail!(
                "planner `{planner_name}` returned an invalid plan ({check}); this is a bug"
            ),
        },
        PlanOutcome::Exhausted | PlanOutcome::Timeout => {
            RunResult::failed(report.episode.time_used)
        }
    };
    Ok((result, report))
}

/// [`run_selector_validated`] with a fresh selector built from a strategy
/// specification.
pub fn run_validated(
    task: &Task,
    strategy: &StrategySpec,
    clock: BudgetClock,
    params: &RoutineParams,
    seed: u64,
) -> Result<(RunResult, SearchReport)> {
    let mut selector = strategy.selector(seed);
    run_selector_validated(task, selector.as_mut(), clock, params, seed, &strategy.display_name())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_names_parse() {
        assert!(matches!(StrategySpec::parse("gbfs"), Ok(StrategySpec::Fixed(RoutineId::Gbfs))));
        assert!(matches!(
            StrategySpec::parse("dfs"),
            Ok(StrategySpec::Fixed(RoutineId::HeuristicDfs))
        ));
        assert!(matches!(StrategySpec::parse("uniform"), Ok(StrategySpec::Uniform)));
        assert!(StrategySpec::parse("no/such/policy.file").is_err());
    }

    #[test]
    fn reference_set_covers_all_routines() {
        let names: Vec<String> =
            reference_strategies().iter().map(StrategySpec::display_name).collect();
        assert_eq!(names, vec!["gbfs", "eps-greedy", "rw-gbfs", "local", "dfs"]);
    }

    #[test]
    fn run_validated_solves_a_generated_task() {
        use altplan_core::probgen::{generate_task, GenDomain, GenSpec};
        let task = generate_task(&GenSpec::new(GenDomain::Delivery, 3, 1)).unwrap();
        let (result, report) = run_validated(
            &task,
            &StrategySpec::Fixed(RoutineId::Gbfs),
            BudgetClock::expansions(20_000, 300),
            &RoutineParams::default(),
            5,
        )
        .unwrap();
        assert!(result.solved);
        assert!(result.cost.is_some());
        assert!(matches!(report.outcome, PlanOutcome::Solved(_)));
        assert_eq!(report.episode.time_used, result.time_used);
    }
}
