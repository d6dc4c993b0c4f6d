//! Report writers: a comma-delimited machine table and an aligned text
//! table for evaluation scores, plus the per-update training log used for
//! learning-curve plots.

use std::fmt::Write as _;

use altplan_core::routines::RoutineId;
use altplan_core::strategy::SearchFeature;

use crate::evaluate::EvalOutput;
use crate::train::TrainLogRow;

/// Machine-readable scores: one row per (metric, planner, problem) mean
/// plus a TOTAL row per planner.
pub fn eval_csv(out: &EvalOutput) -> String {
    let mut csv = String::from("metric,planner,problem,score\n");
    for (metric, table) in &out.tables {
        for (pi, planner) in out.planners.iter().enumerate() {
            for (qi, problem) in out.problems.iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    metric.name(),
                    planner,
                    problem,
                    table.per_problem[pi][qi]
                );
            }
            let _ = writeln!(csv, "{},{},TOTAL,{}", metric.name(), planner, table.totals[pi]);
        }
    }
    csv
}

/// Aligned summary: planners as rows, metric totals and coverage as columns.
pub fn eval_text(out: &EvalOutput) -> String {
    let name_width = out
        .planners
        .iter()
        .map(String::len)
        .chain(std::iter::once("planner".len()))
        .max()
        .unwrap_or(8);
    let mut text = format!(
        "{} problems, {} repeats, budget {} per problem\n",
        out.problems.len(),
        out.repeats,
        out.t_max
    );
    let _ = write!(text, "{:<name_width$}", "planner");
    for (metric, _) in &out.tables {
        let _ = write!(text, " {:>10}", metric.name());
    }
    let _ = writeln!(text, " {:>10}", "coverage");
    for (pi, planner) in out.planners.iter().enumerate() {
        let _ = write!(text, "{planner:<name_width$}");
        for (_, table) in &out.tables {
            let _ = write!(text, " {:>10.2}", table.totals[pi]);
        }
        let _ = writeln!(text, " {:>10.1}", out.coverage[pi]);
    }
    text
}

/// Per-update training log with one probability column per (state, routine)
/// pair, ready for external plotting.
pub fn train_log_csv(rows: &[TrainLogRow]) -> String {
    let mut csv = String::from("update,episodes");
    for state in SearchFeature::all() {
        for routine in RoutineId::ALL {
            let _ = write!(csv, ",pi[{}][{}]", state.label(), routine.name());
        }
    }
    csv.push('\n');
    for row in rows {
        let _ = write!(csv, "{},{}", row.update, row.episodes);
        for state in SearchFeature::all() {
            for routine in RoutineId::ALL {
                let _ = write!(csv, ",{}", row.probs[state.index()][routine.index()]);
            }
        }
        csv.push('\n');
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;
    use altplan_core::scoring::{Metric, ScoreTable};

    fn sample_output() -> EvalOutput {
        EvalOutput {
            planners: vec!["gbfs".into(), "uniform".into()],
            problems: vec!["p0".into(), "p1".into()],
            repeats: 2,
            t_max: 5.0,
            tables: vec![(
                Metric::Ipc,
                ScoreTable {
                    per_problem: vec![vec![1.0, 0.5], vec![0.25, 0.0]],
                    totals: vec![1.5, 0.25],
                },
            )],
            coverage: vec![2.0, 1.0],
        }
    }

    #[test]
    fn csv_contains_cells_and_totals() {
        let csv = eval_csv(&sample_output());
        assert!(csv.starts_with("metric,planner,problem,score\n"));
        assert!(csv.contains("ipc,gbfs,p1,0.5"));
        assert!(csv.contains("ipc,gbfs,TOTAL,1.5"));
        assert!(csv.contains("ipc,uniform,TOTAL,0.25"));
    }

    #[test]
    fn text_table_lists_planners() {
        let text = eval_text(&sample_output());
        assert!(text.contains("planner"));
        assert!(text.contains("gbfs"));
        assert!(text.contains("1.50"));
    }

    #[test]
    fn train_log_has_twenty_probability_columns() {
        let header = train_log_csv(&[]);
        assert_eq!(header.trim_end().split(',').count(), 2 + 20);
        assert!(header.contains("pi[near-early][gbfs]"));
        assert!(header.contains("pi[far-late][dfs]"));
    }
}
