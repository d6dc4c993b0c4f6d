//! The training loop: sample a problem, make sure its reference cost is
//! cached, run a batch of episodes under the current policy, turn outcomes
//! into rewards and apply the batched policy-gradient update.

use std::time::Instant;

use altplan_core::probgen::derive_seed;
use altplan_core::scoring::{reward_ipc, reward_ipc2, reward_time, Metric};
use altplan_core::strategy::{
    BaselineTable, EpisodeRecord, Policy, SearchFeature, NUM_ACTIONS, NUM_STATES,
};
use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::TrainConfig;
use crate::policy_file::{PolicyFile, PolicyMeta};
use crate::refcache::{problem_key, RefCostCache};
use crate::runner::{
    load_problem_dir, reference_strategies, run_selector_validated, run_validated, Problem,
};

/// One report row per policy update: the action probabilities of every
/// search state after the update, keyed by how many episodes were consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainLogRow {
    pub update: u64,
    pub episodes: u64,
    pub probs: [[f64; NUM_ACTIONS]; NUM_STATES],
}

#[derive(Debug)]
pub struct TrainOutput {
    pub policy: PolicyFile,
    pub log: Vec<TrainLogRow>,
    pub episodes: u64,
    pub updates: u64,
    /// Batches dropped because no episode had a defined reward.
    pub skipped_batches: u64,
}

// Seed-stream salts so problem sampling, episodes and reference runs draw
// from disjoint streams of the master seed.
const SALT_SAMPLER: u64 = 0x5a;
const SALT_EPISODE: u64 = 0xe0_0000_0000;
const SALT_REFERENCE: u64 = 0x4e_0000_0000;

pub fn train(cfg: &TrainConfig, quiet: bool) -> Result<TrainOutput> {
    cfg.validate()?;
    let problems = load_problem_dir(&cfg.problems)?;
    let cache_path = cfg
        .ref_cache
        .clone()
        .unwrap_or_else(|| cfg.problems.join("refcosts.cache"));
    let mut cache = RefCostCache::load(&cache_path);

    let mut policy = Policy::uniform(derive_seed(cfg.seed, 0x90));
    let mut baseline = BaselineTable::new();
    let mut sampler = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, SALT_SAMPLER));

    let started = Instant::now();
    let mut episodes: u64 = 0;
    let mut updates: u64 = 0;
    let mut skipped_batches: u64 = 0;
    let mut state_visits = [0u64; NUM_STATES];
    let mut log = Vec::new();

    loop {
        match (cfg.train_seconds, cfg.train_updates) {
            (Some(secs), _) if started.elapsed().as_secs_f64() >= secs => break,
            (_, Some(n)) if updates >= n => break,
            _ => {}
        }

        let problem = &problems[sampler.gen_range(0..problems.len())];
        let c_min = match cfg.reward {
            Metric::Ipc | Metric::Ipc2 => {
                Some(ensure_reference_cost(cfg, problem, &mut cache)?)
            }
            Metric::Time => None,
        };

        let mut batch: Vec<EpisodeRecord> = Vec::with_capacity(cfg.batch_n);
        for _ in 0..cfg.batch_n {
            let seed = derive_seed(cfg.seed, SALT_EPISODE + episodes);
            episodes += 1;
            // Episodes run under the live policy: its RNG stream carries
            // across the whole training run, only the search seed varies.
            let (result, report) = run_selector_validated(
                &problem.task,
                &mut policy,
                cfg.budget_clock(),
                &cfg.params,
                seed,
                "trainee",
            )?;
            let mut record = report.episode;
            record.return_g = match cfg.reward {
                Metric::Ipc => reward_ipc(c_min.flatten(), result.cost),
                Metric::Ipc2 => reward_ipc2(c_min.flatten(), result.cost),
                Metric::Time => {
                    Some(reward_time(result.solved, result.time_used, cfg.t_max_units()))
                }
            };
            for s in 0..NUM_STATES {
                state_visits[s] +=
                    u64::from(record.visit_counts[s].iter().sum::<u32>());
            }
            batch.push(record);
        }

        let defined: Vec<EpisodeRecord> =
            batch.into_iter().filter(|r| r.return_g.is_some()).collect();
        if policy.reinforce_update(&defined, &mut baseline, cfg.alpha) {
            updates += 1;
            let probs = std::array::from_fn(|s| {
                policy.action_probs(SearchFeature::from_index(s))
            });
            log.push(TrainLogRow { update: updates, episodes, probs });
            if !quiet && updates % 25 == 0 {
                eprintln!(
                    "update {updates}: {episodes} episodes, {:.0}s elapsed",
                    started.elapsed().as_secs_f64()
                );
            }
        } else {
            skipped_batches += 1;
        }
    }

    let meta = PolicyMeta {
        reward: cfg.reward.name().to_string(),
        alpha: cfg.alpha,
        seed: cfg.seed,
        episodes,
        updates,
        trained_on: cfg.problems.display().to_string(),
        state_visits,
    };
    Ok(TrainOutput {
        policy: PolicyFile { theta: *policy.theta(), meta },
        log,
        episodes,
        updates,
        skipped_batches,
    })
}

/// Returns the cached `c_min` for the problem, running the five reference
/// planners at the training timeout on a cache miss.
fn ensure_reference_cost(
    cfg: &TrainConfig,
    problem: &Problem,
    cache: &mut RefCostCache,
) -> Result<Option<u64>> {
    let key = problem_key(&problem.bytes, &cfg.params, cfg.budget_mode);
    let t_max = cfg.t_max_units();
    if let Some(cached) = cache.get(&key, t_max) {
        return Ok(cached);
    }
    let mut best: Option<u64> = None;
    for (i, strategy) in reference_strategies().iter().enumerate() {
        let seed = derive_seed(cfg.seed, SALT_REFERENCE + i as u64);
        let (result, _) =
            run_validated(&problem.task, strategy, cfg.budget_clock(), &cfg.params, seed)
                .with_context(|| format!("reference run on {}", problem.name))?;
        best = match (best, result.cost) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    cache.put(&key, t_max, best)?;
    Ok(best)
}
