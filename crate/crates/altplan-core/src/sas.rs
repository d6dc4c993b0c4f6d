//! Reading and writing grounded tasks in a subset of the Fast Downward
//! SAS v3 translator output format.
//!
//! Supported grammar (one token group per line, surrounding whitespace
//! ignored, values are decimal integers):
//!
//! ```text
//! begin_version
//! 3
//! end_version
//! begin_metric
//! <0|1>                      # 0: all operator costs are read as 1
//! end_metric
//! <variable count N>
//! N x:
//!   begin_variable
//!   <name>
//!   <axiom layer>            # must be -1; axiom layers are rejected
//!   <domain size D>          # >= 1
//!   D x <value name>
//!   end_variable
//! <mutex group count M>      # groups are parsed and ignored
//! M x:
//!   begin_mutex_group
//!   <fact count F>
//!   F x <var> <val>
//!   end_mutex_group
//! begin_state
//! N x <value>                # one value per variable
//! end_state
//! begin_goal
//! <goal count G>
//! G x <var> <val>            # no variable may repeat
//! end_goal
//! <operator count K>
//! K x:
//!   begin_operator
//!   <name>
//!   <prevail count P>
//!   P x <var> <val>
//!   <effect count E>         # >= 1
//!   E x <C> <var> <pre> <post>   # C (effect conditions) must be 0;
//!                                # pre == -1 means "no precondition"
//!   <cost>
//!   end_operator
//! <axiom count>              # must be 0; begin_rule sections are rejected
//! ```
//!
//! Prevail conditions and effect preconditions are folded into a single
//! operator precondition. Mutex groups are range-checked and dropped. Writing
//! a parsed task and parsing the output again yields a structurally identical
//! task.

use std::fmt::Write as _;

use thiserror::Error;

use crate::task::{Operator, PartialAssignment, State, Task, Val, Var, VariableDef};

/// Errors raised while reading a task file. Lines are 1-based.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SasError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unsupported feature: {feature}")]
    Unsupported { line: usize, feature: String },
    #[error("line {line}: semantic error: {message}")]
    Semantic { line: usize, message: String },
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { lines: text.lines().map(str::trim).collect(), pos: 0 }
    }

    /// 1-based number of the line about to be read (or just read).
    fn line_no(&self) -> usize {
        self.pos.max(1)
    }

    fn next(&mut self, what: &str) -> Result<&'a str, SasError> {
        while let Some(&line) = self.lines.get(self.pos) {
            self.pos += 1;
            if !line.is_empty() {
                return Ok(line);
            }
        }
        Err(SasError::Syntax {
            line: self.lines.len().max(1),
            message: format!("unexpected end of file, expected {what}"),
        })
    }

    fn expect(&mut self, keyword: &str) -> Result<(), SasError> {
        let line = self.next(keyword)?;
        if line != keyword {
            if line == "begin_rule" {
                return Err(SasError::Unsupported { line: self.line_no(), feature: "axioms (begin_rule)".into() });
            }
            return Err(SasError::Syntax {
                line: self.line_no(),
                message: format!("expected `{keyword}`, found `{line}`"),
            });
        }
        Ok(())
    }

    fn int(&mut self, what: &str) -> Result<i64, SasError> {
        let line = self.next(what)?;
        line.parse::<i64>().map_err(|_| SasError::Syntax {
            line: self.line_no(),
            message: format!("expected {what} (an integer), found `{line}`"),
        })
    }

    fn uint(&mut self, what: &str) -> Result<usize, SasError> {
        let v = self.int(what)?;
        if v < 0 {
            return Err(SasError::Syntax {
                line: self.line_no(),
                message: format!("expected non-negative {what}, found {v}"),
            });
        }
        Ok(v as usize)
    }

    /// Parses `n` whitespace-separated integers from one line.
    fn ints(&mut self, n: usize, what: &str) -> Result<Vec<i64>, SasError> {
        let line = self.next(what)?;
        let parts: Vec<i64> = line
            .split_whitespace()
            .map(|p| p.parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| SasError::Syntax {
                line: self.line_no(),
                message: format!("expected {n} integers ({what}), found `{line}`"),
            })?;
        if parts.len() != n {
            return Err(SasError::Syntax {
                line: self.line_no(),
                message: format!("expected {n} integers ({what}), found {}", parts.len()),
            });
        }
        Ok(parts)
    }

    fn at_end(&mut self) -> bool {
        while let Some(&line) = self.lines.get(self.pos) {
            if !line.is_empty() {
                return false;
            }
            self.pos += 1;
        }
        true
    }
}

fn check_fact(
    vars: &[VariableDef],
    var: i64,
    val: i64,
    line: usize,
) -> Result<(Var, Val), SasError> {
    if var < 0 || (var as usize) >= vars.len() {
        return Err(SasError::Semantic {
            line,
            message: format!("variable {var} out of range (task has {} variables)", vars.len()),
        });
    }
    let def = &vars[var as usize];
    if val < 0 || (val as usize) >= def.domain_size {
        return Err(SasError::Semantic {
            line,
            message: format!(
                "value {val} out of range for variable {var} (domain size {})",
                def.domain_size
            ),
        });
    }
    Ok((var as Var, val as Val))
}

/// Parses a grounded task from file contents.
pub fn parse_task(text: &str) -> Result<Task, SasError> {
    let mut lx = Lines::new(text);

    lx.expect("begin_version")?;
    let version = lx.int("version number")?;
    if version != 3 {
        return Err(SasError::Unsupported {
            line: lx.line_no(),
            feature: format!("SAS version {version} (only version 3 is supported)"),
        });
    }
    lx.expect("end_version")?;

    lx.expect("begin_metric")?;
    let metric = match lx.int("metric flag")? {
        0 => false,
        1 => true,
        other => {
            return Err(SasError::Syntax {
                line: lx.line_no(),
                message: format!("metric flag must be 0 or 1, found {other}"),
            })
        }
    };
    lx.expect("end_metric")?;

    let num_vars = lx.uint("variable count")?;
    let mut variables = Vec::with_capacity(num_vars);
    for id in 0..num_vars {
        lx.expect("begin_variable")?;
        let name = lx.next("variable name")?.to_string();
        let layer = lx.int("axiom layer")?;
        if layer != -1 {
            return Err(SasError::Unsupported {
                line: lx.line_no(),
                feature: "axiom layers (derived variables)".into(),
            });
        }
        let domain_size = lx.uint("domain size")?;
        if domain_size == 0 {
            return Err(SasError::Semantic { line: lx.line_no(), message: "domain size must be >= 1".into() });
        }
        if domain_size > usize::from(Val::MAX) {
            return Err(SasError::Unsupported {
                line: lx.line_no(),
                feature: format!("domain size {domain_size} (maximum {})", Val::MAX),
            });
        }
        let mut value_names = Vec::with_capacity(domain_size);
        for _ in 0..domain_size {
            value_names.push(lx.next("value name")?.to_string());
        }
        lx.expect("end_variable")?;
        variables.push(VariableDef { id, name, domain_size, value_names });
    }

    // Mutex groups: structurally parsed and range-checked, then dropped.
    let num_mutexes = lx.uint("mutex group count")?;
    for _ in 0..num_mutexes {
        lx.expect("begin_mutex_group")?;
        let facts = lx.uint("mutex fact count")?;
        for _ in 0..facts {
            let pair = lx.ints(2, "mutex fact")?;
            check_fact(&variables, pair[0], pair[1], lx.line_no())?;
        }
        lx.expect("end_mutex_group")?;
    }

    lx.expect("begin_state")?;
    let mut initial = Vec::with_capacity(num_vars);
    for var in 0..num_vars {
        let val = lx.int("initial state value")?;
        let (_, val) = check_fact(&variables, var as i64, val, lx.line_no())?;
        initial.push(val);
    }
    lx.expect("end_state")?;

    lx.expect("begin_goal")?;
    let goal_count = lx.uint("goal count")?;
    let mut goal_entries = Vec::with_capacity(goal_count);
    for _ in 0..goal_count {
        let pair = lx.ints(2, "goal fact")?;
        goal_entries.push(check_fact(&variables, pair[0], pair[1], lx.line_no())?);
    }
    let goal_line = lx.line_no();
    lx.expect("end_goal")?;
    let goal = PartialAssignment::new(goal_entries).ok_or(SasError::Semantic {
        line: goal_line,
        message: "goal mentions the same variable twice".into(),
    })?;

    let num_ops = lx.uint("operator count")?;
    let mut operators = Vec::with_capacity(num_ops);
    for _ in 0..num_ops {
        lx.expect("begin_operator")?;
        let name = lx.next("operator name")?.to_string();

        let prevail_count = lx.uint("prevail count")?;
        let mut pre_entries = Vec::new();
        for _ in 0..prevail_count {
            let pair = lx.ints(2, "prevail condition")?;
            pre_entries.push(check_fact(&variables, pair[0], pair[1], lx.line_no())?);
        }

        let effect_count = lx.uint("effect count")?;
        if effect_count == 0 {
            return Err(SasError::Semantic {
                line: lx.line_no(),
                message: format!("operator `{name}` has no effects"),
            });
        }
        let mut eff_entries = Vec::with_capacity(effect_count);
        for _ in 0..effect_count {
            let line = lx.next("effect")?;
            let parts: Vec<i64> = line
                .split_whitespace()
                .map(|p| p.parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| SasError::Syntax {
                    line: lx.line_no(),
                    message: format!("malformed effect line `{line}`"),
                })?;
            if parts.is_empty() {
                return Err(SasError::Syntax { line: lx.line_no(), message: "empty effect line".into() });
            }
            let conditions = parts[0];
            if conditions != 0 {
                return Err(SasError::Unsupported {
                    line: lx.line_no(),
                    feature: "conditional effects".into(),
                });
            }
            if parts.len() != 4 {
                return Err(SasError::Syntax {
                    line: lx.line_no(),
                    message: format!("expected `0 var pre post`, found `{line}`"),
                });
            }
            let (var, post) = check_fact(&variables, parts[1], parts[3], lx.line_no())?;
            let pre = parts[2];
            if pre != -1 {
                let (_, pre_val) = check_fact(&variables, parts[1], pre, lx.line_no())?;
                pre_entries.push((var, pre_val));
            }
            eff_entries.push((var, post));
        }

        let declared_cost = lx.int("operator cost")?;
        if declared_cost < 0 {
            return Err(SasError::Semantic {
                line: lx.line_no(),
                message: format!("operator `{name}` has negative cost {declared_cost}"),
            });
        }
        lx.expect("end_operator")?;
        let op_line = lx.line_no();

        let precondition = PartialAssignment::new(pre_entries).ok_or(SasError::Semantic {
            line: op_line,
            message: format!("operator `{name}` constrains the same variable twice"),
        })?;
        let effect = PartialAssignment::new(eff_entries).ok_or(SasError::Semantic {
            line: op_line,
            message: format!("operator `{name}` sets the same variable twice"),
        })?;
        let cost = if metric { declared_cost as u32 } else { 1 };
        operators.push(Operator { name, precondition, effect, cost });
    }

    let axiom_count = lx.uint("axiom count")?;
    if axiom_count != 0 {
        return Err(SasError::Unsupported { line: lx.line_no(), feature: "axioms".into() });
    }
    if !lx.at_end() {
        let line = lx.next("end of file")?;
        if line == "begin_rule" {
            return Err(SasError::Unsupported { line: lx.line_no(), feature: "axioms (begin_rule)".into() });
        }
        return Err(SasError::Syntax {
            line: lx.line_no(),
            message: format!("trailing content after task: `{line}`"),
        });
    }

    Task::new(variables, operators, State::new(initial), goal, metric).map_err(|e| SasError::Semantic {
        line: 0,
        message: e.to_string(),
    })
}

/// Serializes a task in the supported subset. Mutex groups are never emitted;
/// preconditions on effect variables are written as effect preconditions and
/// the rest as prevail conditions.
pub fn write_task(task: &Task) -> String {
    let mut out = String::new();
    out.push_str("begin_version\n3\nend_version\n");
    let _ = writeln!(out, "begin_metric\n{}\nend_metric", if task.metric { 1 } else { 0 });
    let _ = writeln!(out, "{}", task.num_variables());
    for def in &task.variables {
        out.push_str("begin_variable\n");
        let _ = writeln!(out, "{}", def.name);
        let _ = writeln!(out, "-1\n{}", def.domain_size);
        for name in &def.value_names {
            let _ = writeln!(out, "{name}");
        }
        out.push_str("end_variable\n");
    }
    out.push_str("0\n"); // mutex groups
    out.push_str("begin_state\n");
    for &v in task.initial.values() {
        let _ = writeln!(out, "{v}");
    }
    out.push_str("end_state\n");
    let _ = writeln!(out, "begin_goal\n{}", task.goal.len());
    for &(var, val) in task.goal.entries() {
        let _ = writeln!(out, "{var} {val}");
    }
    out.push_str("end_goal\n");
    let _ = writeln!(out, "{}", task.num_operators());
    for op in &task.operators {
        out.push_str("begin_operator\n");
        let _ = writeln!(out, "{}", op.name);
        let prevail: Vec<(Var, Val)> = op
            .precondition
            .entries()
            .iter()
            .copied()
            .filter(|&(var, _)| op.effect.value_of(var).is_none())
            .collect();
        let _ = writeln!(out, "{}", prevail.len());
        for (var, val) in prevail {
            let _ = writeln!(out, "{var} {val}");
        }
        let _ = writeln!(out, "{}", op.effect.len());
        for &(var, post) in op.effect.entries() {
            match op.precondition.value_of(var) {
                Some(pre) => {
                    let _ = writeln!(out, "0 {var} {pre} {post}");
                }
                None => {
                    let _ = writeln!(out, "0 {var} -1 {post}");
                }
            }
        }
        let _ = writeln!(out, "{}", if task.metric { op.cost } else { 1 });
        out.push_str("end_operator\n");
    }
    out.push_str("0\n"); // axioms
    out
}
