//! Training configuration: defaults, the key-value config file format, and
//! budget-clock construction shared by every subcommand.
//!
//! Config files hold one `key = value` pair per line; `#` starts a comment.
//! Every field can also be set from the command line, and command-line flags
//! win over the file.

use std::path::PathBuf;

use altplan_core::routines::RoutineParams;
use altplan_core::scoring::Metric;
use altplan_core::search::{BudgetClock, BudgetMode, DEFAULT_EXPANSION_SLICE};
use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub reward: Metric,
    pub alpha: f64,
    pub batch_n: usize,
    pub budget_mode: BudgetMode,
    /// Per-problem budget and slice in wall-clock mode.
    pub timeout_s: f64,
    pub slice_ms: f64,
    /// Per-problem budget and slice in expansion mode.
    pub timeout_expansions: u64,
    pub slice_expansions: u64,
    /// Total training budget: exactly one of these must be set.
    pub train_seconds: Option<f64>,
    pub train_updates: Option<u64>,
    pub seed: u64,
    /// Directory of `.sas` problem files.
    pub problems: PathBuf,
    pub params: RoutineParams,
    /// Reference-cost cache file; defaults to `refcosts.cache` next to the
    /// problem set.
    pub ref_cache: Option<PathBuf>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            reward: Metric::Ipc,
            alpha: 0.02,
            batch_n: 5,
            budget_mode: BudgetMode::WallClock,
            timeout_s: 5.0,
            slice_ms: 100.0,
            timeout_expansions: 50_000,
            slice_expansions: DEFAULT_EXPANSION_SLICE,
            train_seconds: None,
            train_updates: None,
            seed: 0,
            problems: PathBuf::new(),
            params: RoutineParams::default(),
            ref_cache: None,
        }
    }
}

impl TrainConfig {
    /// Per-problem budget clock for the configured mode.
    pub fn budget_clock(&self) -> BudgetClock {
        match self.budget_mode {
            BudgetMode::WallClock => BudgetClock::wall(self.timeout_s, self.slice_ms / 1000.0),
            BudgetMode::Expansions => {
                BudgetClock::expansions(self.timeout_expansions, self.slice_expansions)
            }
        }
    }

    /// The per-problem budget in clock units (seconds or expansions).
    pub fn t_max_units(&self) -> f64 {
        match self.budget_mode {
            BudgetMode::WallClock => self.timeout_s,
            BudgetMode::Expansions => self.timeout_expansions as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_n == 0 {
            bail!("batch_n must be at least 1");
        }
        if self.alpha <= 0.0 {
            bail!("alpha must be positive");
        }
        if self.timeout_s <= self.slice_ms / 1000.0 {
            bail!("timeout_s must exceed the slice length");
        }
        if self.timeout_expansions <= self.slice_expansions {
            bail!("timeout_expansions must exceed slice_expansions");
        }
        if !(0.0..=1.0).contains(&self.params.epsilon) {
            bail!("epsilon must lie in [0, 1]");
        }
        if self.params.stall_s == 0 || self.params.walk_len_l == 0 {
            bail!("rw_stall_s and rw_walk_l must be at least 1");
        }
        match (self.train_seconds, self.train_updates) {
            (Some(_), Some(_)) => bail!("set train_seconds or train_updates, not both"),
            (None, None) => bail!("a training budget is required (train_seconds or train_updates)"),
            _ => {}
        }
        if self.problems.as_os_str().is_empty() {
            bail!("a problem-set path is required");
        }
        Ok(())
    }

    /// Applies one key-value pair (config file or command line).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "reward" => {
                self.reward =
                    Metric::parse(v).ok_or_else(|| anyhow!("unknown reward `{v}`"))?;
            }
            "alpha" => self.alpha = parse(v, key)?,
            "batch_n" => self.batch_n = parse(v, key)?,
            "budget_mode" => self.budget_mode = parse_budget_mode(v)?,
            "timeout_s" => self.timeout_s = parse(v, key)?,
            "slice_ms" => self.slice_ms = parse(v, key)?,
            "timeout_expansions" => self.timeout_expansions = parse(v, key)?,
            "slice_expansions" => self.slice_expansions = parse(v, key)?,
            "train_seconds" => self.train_seconds = Some(parse(v, key)?),
            "train_updates" => self.train_updates = Some(parse(v, key)?),
            "seed" => self.seed = parse(v, key)?,
            "problems" => self.problems = PathBuf::from(v),
            "epsilon" => self.params.epsilon = parse(v, key)?,
            "rw_stall_s" => self.params.stall_s = parse(v, key)?,
            "rw_walk_l" => self.params.walk_len_l = parse(v, key)?,
            "ref_cache" => self.ref_cache = Some(PathBuf::from(v)),
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    /// Parses a `key = value` config file on top of the defaults.
    pub fn from_file_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            cfg.set(key.trim(), value)
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(cfg)
    }
}

pub fn parse_budget_mode(v: &str) -> Result<BudgetMode> {
    match v {
        "wall" => Ok(BudgetMode::WallClock),
        "expansions" => Ok(BudgetMode::Expansions),
        other => bail!("unknown budget mode `{other}` (use wall or expansions)"),
    }
}

fn parse<T: std::str::FromStr>(v: &str, key: &str) -> Result<T> {
    v.parse().map_err(|_| anyhow!("invalid value `{v}` for `{key}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_overrides_defaults() {
        let text = "\
# training setup
reward = time
alpha = 0.05
batch_n = 3
budget_mode = expansions
timeout_expansions = 9000
slice_expansions = 250
train_updates = 40
seed = 11
problems = problems/delivery
epsilon = 0.3
rw_stall_s = 7
rw_walk_l = 11
";
        let cfg = TrainConfig::from_file_text(text).unwrap();
        assert_eq!(cfg.reward, Metric::Time);
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.batch_n, 3);
        assert_eq!(cfg.budget_mode, BudgetMode::Expansions);
        assert_eq!(cfg.timeout_expansions, 9000);
        assert_eq!(cfg.train_updates, Some(40));
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.params.epsilon, 0.3);
        assert_eq!(cfg.params.stall_s, 7);
        assert_eq!(cfg.params.walk_len_l, 11);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(TrainConfig::from_file_text("bogus = 1\n").is_err());
    }

    #[test]
    fn validation_catches_missing_budget() {
        let mut cfg = TrainConfig::default();
        cfg.problems = PathBuf::from("p");
        assert!(cfg.validate().is_err());
        cfg.train_updates = Some(5);
        cfg.validate().unwrap();
        cfg.train_seconds = Some(1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn defaults_match_documented_values() {
        let cfg = TrainConfig::default();
        assert_eq!(cfg.alpha, 0.02);
        assert_eq!(cfg.batch_n, 5);
        assert_eq!(cfg.timeout_s, 5.0);
        assert_eq!(cfg.slice_ms, 100.0);
        assert_eq!(cfg.params.epsilon, 0.2);
        assert_eq!(cfg.params.stall_s, 5);
        assert_eq!(cfg.params.walk_len_l, 20);
    }
}
