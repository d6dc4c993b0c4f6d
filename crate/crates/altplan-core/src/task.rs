//! Grounded finite-domain planning tasks: variables, operators, states and
//! plan validation.
//!
//! A task is a tuple of multi-valued state variables, grounded operators with
//! partial-assignment preconditions and effects, an initial state and a goal.
//! Everything here is immutable after construction; a [`Task`] can be shared
//! freely between concurrent planner instances.

use std::fmt;

use thiserror::Error;

/// Index of a state variable within a task.
pub type Var = usize;
/// Value index within a variable's domain.
pub type Val = u16;

/// One finite-domain state variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDef {
    /// Position of this variable in the task's variable list.
    pub id: Var,
    /// Human-readable name (informational, kept for round-tripping).
    pub name: String,
    /// Number of values in the domain; at least 1.
    pub domain_size: usize,
    /// One name per value (informational).
    pub value_names: Vec<String>,
}

/// A set of (variable, value) pairs with strictly increasing variable ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialAssignment {
    entries: Vec<(Var, Val)>,
}

impl PartialAssignment {
    /// Builds a partial assignment, sorting the entries by variable.
    /// Returns `None` if the same variable occurs twice.
    pub fn new(mut entries: Vec<(Var, Val)>) -> Option<Self> {
        entries.sort_unstable_by_key(|&(v, _)| v);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        Some(Self { entries })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(Var, Val)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The value this assignment prescribes for `var`, if any.
    pub fn value_of(&self, var: Var) -> Option<Val> {
        self.entries
            .binary_search_by_key(&var, |&(v, _)| v)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// True iff every entry agrees with `state` (subset check).
    pub fn satisfied_by(&self, state: &State) -> bool {
        self.entries.iter().all(|&(v, val)| state.value(v) == val)
    }
}

/// A full assignment: one value per task variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    values: Box<[Val]>,
}

impl State {
    pub fn new(values: Vec<Val>) -> Self {
        Self { values: values.into_boxed_slice() }
    }

    pub fn value(&self, var: Var) -> Val {
        self.values[var]
    }

    pub fn values(&self) -> &[Val] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A grounded operator with folded precondition (prevail conditions included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    pub name: String,
    pub precondition: PartialAssignment,
    /// Non-empty by construction.
    pub effect: PartialAssignment,
    pub cost: u32,
}

impl Operator {
    /// True iff the precondition is a subset of `state`.
    pub fn applicable_in(&self, state: &State) -> bool {
        self.precondition.satisfied_by(state)
    }

    /// Successor state: `state` with the effect variables overwritten.
    /// The input is left untouched. Callers must check applicability first.
    pub fn apply(&self, state: &State) -> State {
        debug_assert!(self.applicable_in(state), "apply() on inapplicable operator {}", self.name);
        let mut values = state.values.to_vec();
        for &(var, val) in self.effect.entries() {
            values[var] = val;
        }
        State::new(values)
    }
}

/// A grounded finite-domain planning task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub variables: Vec<VariableDef>,
    pub operators: Vec<Operator>,
    pub initial: State,
    pub goal: PartialAssignment,
    /// Whether the source file declared a cost metric. With `metric == false`
    /// all operator costs are normalized to 1 at construction time.
    pub metric: bool,
}

/// Structural errors for hand-constructed tasks.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaskError {
    #[error("variable {var}: id does not match its position")]
    BadVariableId { var: Var },
    #[error("variable {var}: empty domain")]
    EmptyDomain { var: Var },
    #[error("variable {var}: {names} value names for domain size {size}")]
    ValueNameMismatch { var: Var, names: usize, size: usize },
    #[error("state has {got} values, task has {want} variables")]
    StateLength { got: usize, want: usize },
    #[error("variable {var} out of range")]
    VarOutOfRange { var: Var },
    #[error("value {val} out of range for variable {var} (domain size {size})")]
    ValOutOfRange { var: Var, val: Val, size: usize },
    #[error("operator {op} has an empty effect")]
    EmptyEffect { op: usize },
    #[error("plan step {step} references operator {index}, task has {count} operators")]
    OpIndexOutOfRange { step: usize, index: usize, count: usize },
}

impl Task {
    /// Builds a task and checks every structural invariant.
    pub fn new(
        variables: Vec<VariableDef>,
        operators: Vec<Operator>,
        initial: State,
        goal: PartialAssignment,
        metric: bool,
    ) -> Result<Self, TaskError> {
        let task = Self { variables, operators, initial, goal, metric };
        task.validate()?;
        Ok(task)
    }

    fn check_assignment(&self, pa: &PartialAssignment) -> Result<(), TaskError> {
        for &(var, val) in pa.entries() {
            let def = self.variables.get(var).ok_or(TaskError::VarOutOfRange { var })?;
            if (val as usize) >= def.domain_size {
                return Err(TaskError::ValOutOfRange { var, val, size: def.domain_size });
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), TaskError> {
        for (i, def) in self.variables.iter().enumerate() {
            if def.id != i {
                return Err(TaskError::BadVariableId { var: i });
            }
            if def.domain_size == 0 {
                return Err(TaskError::EmptyDomain { var: i });
            }
            if def.value_names.len() != def.domain_size {
                return Err(TaskError::ValueNameMismatch {
                    var: i,
                    names: def.value_names.len(),
                    size: def.domain_size,
                });
            }
        }
        if self.initial.len() != self.variables.len() {
            return Err(TaskError::StateLength {
                got: self.initial.len(),
                want: self.variables.len(),
            });
        }
        for (var, def) in self.variables.iter().enumerate() {
            let val = self.initial.value(var);
            if (val as usize) >= def.domain_size {
                return Err(TaskError::ValOutOfRange { var, val, size: def.domain_size });
            }
        }
        self.check_assignment(&self.goal)?;
        for (i, op) in self.operators.iter().enumerate() {
            if op.effect.is_empty() {
                return Err(TaskError::EmptyEffect { op: i });
            }
            self.check_assignment(&op.precondition)?;
            self.check_assignment(&op.effect)?;
        }
        Ok(())
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_operators(&self) -> usize {
        self.operators.len()
    }

    /// Total number of (variable, value) facts.
    pub fn num_facts(&self) -> usize {
        self.variables.iter().map(|v| v.domain_size).sum()
    }

    /// True iff the goal is a subset of `state`.
    pub fn goal_satisfied(&self, state: &State) -> bool {
        self.goal.satisfied_by(state)
    }

    /// Indices of all operators applicable in `state`, in operator order.
    pub fn applicable_operators(&self, state: &State) -> Vec<usize> {
        self.operators
            .iter()
            .enumerate()
            .filter(|(_, op)| op.applicable_in(state))
            .map(|(i, _)| i)
            .collect()
    }
}

/// A sequence of operator indices plus its summed cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<usize>,
    pub cost: u64,
}

impl Plan {
    /// Builds a plan whose cost is the sum of the referenced operators' costs.
    pub fn from_steps(task: &Task, steps: Vec<usize>) -> Result<Self, TaskError> {
        let mut cost = 0u64;
        for (step, &index) in steps.iter().enumerate() {
            let op = task.operators.get(index).ok_or(TaskError::OpIndexOutOfRange {
                step,
                index,
                count: task.num_operators(),
            })?;
            cost += u64::from(op.cost);
        }
        Ok(Self { steps, cost })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Why a plan failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidPlanReason {
    /// The step's operator precondition does not hold.
    Inapplicable,
    /// All steps applied but the final state misses the goal. The reported
    /// step index equals the plan length.
    GoalUnsatisfied,
}

/// Outcome of simulating a plan from the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanCheck {
    Valid { cost: u64 },
    Invalid { step: usize, reason: InvalidPlanReason },
}

impl PlanCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, PlanCheck::Valid { .. })
    }
}

impl fmt::Display for PlanCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanCheck::Valid { cost } => write!(f, "valid, cost {cost}"),
            PlanCheck::Invalid { step, reason } => match reason {
                InvalidPlanReason::Inapplicable => write!(f, "inapplicable at step {step}"),
                InvalidPlanReason::GoalUnsatisfied => write!(f, "goal unsatisfied after step {step}"),
            },
        }
    }
}

/// Simulates `plan` from the task's initial state.
///
/// Valid iff every step is applicable in sequence and the final state
/// satisfies the goal; the reported cost is the sum of step costs. Operator
/// indices out of range are a hard error.
pub fn validate_plan(task: &Task, plan: &Plan) -> Result<PlanCheck, TaskError> {
    let mut state = task.initial.clone();
    let mut cost = 0u64;
    for (step, &index) in plan.steps.iter().enumerate() {
        let op = task.operators.get(index).ok_or(TaskError::OpIndexOutOfRange {
            step,
            index,
            count: task.num_operators(),
        })?;
        if !op.applicable_in(&state) {
            return Ok(PlanCheck::Invalid { step, reason: InvalidPlanReason::Inapplicable });
        }
        state = op.apply(&state);
        cost += u64::from(op.cost);
    }
    if !task.goal_satisfied(&state) {
        return Ok(PlanCheck::Invalid {
            step: plan.steps.len(),
            reason: InvalidPlanReason::GoalUnsatisfied,
        });
    }
    Ok(PlanCheck::Valid { cost })
}
