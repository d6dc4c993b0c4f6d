//! Persistent cache of reference plan costs.
//!
//! Training with cost-based rewards needs, per problem, the best cost
//! `c_min` over the five single-routine reference planners at the training
//! timeout. Reference runs are expensive and (in wall-clock mode)
//! stochastic, so results are cached in a line-oriented file:
//!
//! ```text
//! <key> <timeout> <c_min|NONE>
//! ```
//!
//! where `<key>` is a SHA-256 over the problem bytes, the routine
//! parameters and the budget mode: entries are only reused for identical
//! setups. Duplicate lines merge by keeping the best (lowest) cost, so
//! re-running training can only improve a cached entry. Unparseable lines
//! are dropped with a warning and recomputed on demand.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use altplan_core::routines::RoutineParams;
use altplan_core::search::BudgetMode;
use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Cache key for one (problem, routine parameters, budget mode) triple.
pub fn problem_key(problem_bytes: &[u8], params: &RoutineParams, mode: BudgetMode) -> String {
    let mut hasher = Sha256::new();
    hasher.update(problem_bytes);
    hasher.update(format!(
        "|eps={}|stall={}|walk={}|mode={}",
        params.epsilon,
        params.stall_s,
        params.walk_len_l,
        match mode {
            BudgetMode::WallClock => "wall",
            BudgetMode::Expansions => "expansions",
        }
    ));
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn timeout_tag(t_max: f64) -> String {
    format!("{t_max}")
}

#[derive(Debug)]
pub struct RefCostCache {
    path: PathBuf,
    entries: HashMap<(String, String), Option<u64>>,
}

impl RefCostCache {
    /// Loads the cache, merging duplicate entries by best cost.
    pub fn load(path: &Path) -> Self {
        let mut entries = HashMap::new();
        if let Ok(file) = File::open(path) {
            for (lineno, line) in BufReader::new(file).lines().enumerate() {
                let Ok(line) = line else { break };
                let trimmed = line.trim();
                if trimmed.is_empty() {
                    continue;
                }
                match parse_line(trimmed) {
                    Some((key, cost)) => merge(&mut entries, key, cost),
                    None => eprintln!(
                        "warning: {}:{}: unreadable cache line dropped",
                        path.display(),
                        lineno + 1
                    ),
                }
            }
        }
        Self { path: path.to_path_buf(), entries }
    }

    pub fn get(&self, key: &str, t_max: f64) -> Option<Option<u64>> {
        self.entries.get(&(key.to_string(), timeout_tag(t_max))).copied()
    }

    /// Records a result and appends it to the cache file.
    pub fn put(&mut self, key: &str, t_max: f64, c_min: Option<u64>) -> Result<()> {
        merge(&mut self.entries, (key.to_string(), timeout_tag(t_max)), c_min);
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .with_context(|| format!("opening cache {}", self.path.display()))?;
        let cost = c_min.map_or("NONE".to_string(), |c| c.to_string());
        writeln!(file, "{key} {} {cost}", timeout_tag(t_max))
            .with_context(|| format!("appending to cache {}", self.path.display()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn parse_line(line: &str) -> Option<((String, String), Option<u64>)> {
    let mut parts = line.split_whitespace();
    let key = parts.next()?.to_string();
    let timeout = parts.next()?.to_string();
    let cost = parts.next()?;
    if parts.next().is_some() || key.len() != 64 || !key.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let cost = if cost == "NONE" { None } else { Some(cost.parse().ok()?) };
    Some(((key, timeout), cost))
}

fn merge(
    entries: &mut HashMap<(String, String), Option<u64>>,
    key: (String, String),
    cost: Option<u64>,
) {
    entries
        .entry(key)
        .and_modify(|existing| {
            *existing = match (*existing, cost) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        })
        .or_insert(cost);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_depend_on_bytes_params_and_mode() {
        let p = RoutineParams::default();
        let base = problem_key(b"task", &p, BudgetMode::WallClock);
        assert_eq!(base.len(), 64);
        assert_ne!(base, problem_key(b"task2", &p, BudgetMode::WallClock));
        assert_ne!(base, problem_key(b"task", &p, BudgetMode::Expansions));
        let other = RoutineParams { epsilon: 0.3, ..p };
        assert_ne!(base, problem_key(b"task", &other, BudgetMode::WallClock));
        assert_eq!(base, problem_key(b"task", &p, BudgetMode::WallClock));
    }

    #[test]
    fn merge_keeps_the_best_cost() {
        let mut entries = HashMap::new();
        let key = ("k".to_string(), "5".to_string());
        merge(&mut entries, key.clone(), None);
        assert_eq!(entries[&key], None);
        merge(&mut entries, key.clone(), Some(9));
        assert_eq!(entries[&key], Some(9));
        merge(&mut entries, key.clone(), Some(12));
        assert_eq!(entries[&key], Some(9));
        merge(&mut entries, key.clone(), Some(4));
        assert_eq!(entries[&key], Some(4));
        merge(&mut entries, key.clone(), None);
        assert_eq!(entries[&key], Some(4));
    }

    #[test]
    fn bad_lines_are_skipped_and_good_ones_survive() {
        let dir = std::env::temp_dir().join(format!("altplan-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("refcosts.cache");
        let key = problem_key(b"x", &RoutineParams::default(), BudgetMode::Expansions);
        std::fs::write(&path, format!("garbage line\n{key} 5000 42\nshort\n")).unwrap();

        let mut cache = RefCostCache::load(&path);
        assert_eq!(cache.len(), 1);
        assert_eq!(cache.get(&key, 5000.0), Some(Some(42)));
        assert_eq!(cache.get(&key, 4000.0), None);

        cache.put(&key, 5000.0, Some(40)).unwrap();
        let reloaded = RefCostCache::load(&path);
        assert_eq!(reloaded.get(&key, 5000.0), Some(Some(40)));
        std::fs::remove_dir_all(&dir).ok();
    }
}
