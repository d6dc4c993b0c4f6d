//! Training rewards and evaluation scores.
//!
//! Training rewards compare the learner's plan cost against the best cost
//! `c_min` found by the single-routine reference planners; the learner is
//! deliberately *not* part of that reference set, so beating it pays more
//! than matching it. Evaluation scores put every compared planner into the
//! reference set, capping per-problem scores at 1.

/// Outcome of one planner run on one problem. Costs are present exactly for
/// solved runs; `time_used` is in budget units (seconds or expansions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunResult {
    pub solved: bool,
    pub cost: Option<u64>,
    pub time_used: f64,
}

impl RunResult {
    pub fn solved(cost: u64, time_used: f64) -> Self {
        Self { solved: true, cost: Some(cost), time_used }
    }

    pub fn failed(time_used: f64) -> Self {
        Self { solved: false, cost: None, time_used }
    }
}

/// Best plan cost per problem over the single-routine reference planners;
/// `None` where no reference planner solved the problem.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceCosts {
    per_problem: Vec<Option<u64>>,
}

impl ReferenceCosts {
    pub fn new(per_problem: Vec<Option<u64>>) -> Self {
        Self { per_problem }
    }

    pub fn get(&self, problem: usize) -> Option<u64> {
        self.per_problem.get(problem).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.per_problem.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_problem.is_empty()
    }
}

/// Divisions treat a zero cost as 1 so degenerate inputs cannot divide by
/// zero; the generators never emit zero-cost operators.
fn safe_cost(c: u64) -> f64 {
    c.max(1) as f64
}

/// Training reward based on the IPC score:
/// - both costs defined: `c_min / c_l` (may exceed 1 when the learner beats
///   every reference planner),
/// - only the references solved: 0,
/// - only the learner solved: 2,
/// - nobody solved: undefined, the episode generates no update.
pub fn reward_ipc(c_min: Option<u64>, c_l: Option<u64>) -> Option<f64> {
    match (c_min, c_l) {
        (Some(m), Some(l)) => Some(safe_cost(m) / safe_cost(l)),
        (Some(_), None) => Some(0.0),
        (None, Some(_)) => Some(2.0),
        (None, None) => None,
    }
}

/// Squared IPC reward, capped at 2.
pub fn reward_ipc2(c_min: Option<u64>, c_l: Option<u64>) -> Option<f64> {
    reward_ipc(c_min, c_l).map(|r| (r * r).min(2.0))
}

/// Fraction of the budget left when a solution was found; 0 for failures.
pub fn reward_time(solved: bool, time_used: f64, t_max: f64) -> f64 {
    if solved {
        debug_assert!((0.0..=t_max).contains(&time_used));
        (t_max - time_used) / t_max
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Ipc,
    Ipc2,
    Time,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ipc, Metric::Ipc2, Metric::Time];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ipc => "ipc",
            Metric::Ipc2 => "ipc2",
            Metric::Time => "time",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// Per-planner scores over a problem suite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    /// `per_problem[planner][problem]`.
    pub per_problem: Vec<Vec<f64>>,
    /// Row sums per planner.
    pub totals: Vec<f64>,
}

/// Scores a planner-by-problem result matrix.
///
/// For cost metrics, `c_min` per problem is the minimum cost over all
/// planners in the matrix, so every per-problem score lies in [0, 1] and a
/// planner that alone solves a problem scores 1 there. Unsolved cells score
/// 0. The time metric scores `(t_max - t) / t_max` for solved cells.
pub fn eval_scores(results: &[Vec<RunResult>], metric: Metric, t_max: f64) -> ScoreTable {
    assert!(!results.is_empty(), "empty result matrix");
    let num_problems = results[0].len();
    assert!(results.iter().all(|row| row.len() == num_problems), "ragged result matrix");

    let c_min: Vec<Option<u64>> = (0..num_problems)
        .map(|p| results.iter().filter_map(|row| row[p].cost).min())
        .collect();

    let per_problem: Vec<Vec<f64>> = results
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(p, cell)| match metric {
                    Metric::Ipc | Metric::Ipc2 => match (c_min[p], cell.cost) {
                        (Some(m), Some(c)) => {
                            let z = safe_cost(m) / safe_cost(c);
                            if metric == Metric::Ipc2 {
                                z * z
                            } else {
                                z
                            }
                        }
                        _ => 0.0,
                    },
                    Metric::Time => reward_time(cell.solved, cell.time_used, t_max),
                })
                .collect()
        })
        .collect();
    let totals = per_problem.iter().map(|row| row.iter().sum()).collect();
    ScoreTable { per_problem, totals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ipc_reward_case_table() {
        assert_eq!(reward_ipc(Some(10), Some(10)), Some(1.0));
        assert_eq!(reward_ipc(Some(10), Some(20)), Some(0.5));
        assert_eq!(reward_ipc(Some(20), Some(10)), Some(2.0));
        assert_eq!(reward_ipc(Some(10), None), Some(0.0));
        assert_eq!(reward_ipc(None, Some(7)), Some(2.0));
        assert_eq!(reward_ipc(None, None), None);
    }

    #[test]
    fn ipc2_squares_and_caps() {
        assert_eq!(reward_ipc2(Some(10), Some(20)), Some(0.25));
        assert_eq!(reward_ipc2(Some(20), Some(10)), Some(2.0));
        assert_eq!(reward_ipc2(Some(10), Some(10)), Some(1.0));
        assert_eq!(reward_ipc2(None, Some(3)), Some(2.0));
        assert_eq!(reward_ipc2(None, None), None);
    }

    #[test]
    fn time_reward_endpoints() {
        assert_eq!(reward_time(true, 0.0, 5.0), 1.0);
        assert_eq!(reward_time(true, 5.0, 5.0), 0.0);
        assert_eq!(reward_time(false, 2.0, 5.0), 0.0);
    }

    #[test]
    fn zero_cost_is_treated_as_one() {
        assert_eq!(reward_ipc(Some(0), Some(0)), Some(1.0));
        assert_eq!(reward_ipc(Some(0), Some(2)), Some(0.5));
    }

    #[test]
    fn eval_two_planners_one_problem() {
        let results = vec![
            vec![RunResult::solved(10, 1.0)],
            vec![RunResult::solved(20, 1.0)],
        ];
        let ipc = eval_scores(&results, Metric::Ipc, 5.0);
        assert_eq!(ipc.per_problem, vec![vec![1.0], vec![0.5]]);
        let ipc2 = eval_scores(&results, Metric::Ipc2, 5.0);
        assert_eq!(ipc2.per_problem, vec![vec![1.0], vec![0.25]]);
    }

    #[test]
    fn sole_solver_defines_c_min() {
        let results = vec![
            vec![RunResult::failed(5.0), RunResult::solved(8, 1.0)],
            vec![RunResult::solved(12, 2.0), RunResult::failed(5.0)],
        ];
        let ipc = eval_scores(&results, Metric::Ipc, 5.0);
        assert_eq!(ipc.per_problem[0], vec![0.0, 1.0]);
        assert_eq!(ipc.per_problem[1], vec![1.0, 0.0]);
        assert_eq!(ipc.totals, vec![1.0, 1.0]);
    }

    #[test]
    fn all_failures_score_zero() {
        let results = vec![vec![RunResult::failed(5.0)], vec![RunResult::failed(5.0)]];
        for metric in Metric::ALL {
            let t = eval_scores(&results, metric, 5.0);
            assert_eq!(t.totals, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn time_metric_ignores_costs() {
        let results = vec![vec![RunResult::solved(100, 1.0)], vec![RunResult::solved(1, 4.0)]];
        let t = eval_scores(&results, Metric::Time, 5.0);
        assert!((t.per_problem[0][0] - 0.8).abs() < 1e-12);
        assert!((t.per_problem[1][0] - 0.2).abs() < 1e-12);
    }
}
