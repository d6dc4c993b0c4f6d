//! Routine-selection strategies: the coarse search-state feature, the
//! tabular softmax policy, and the batched REINFORCE update.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::heuristic::INFINITE_H;
use crate::routines::RoutineId;

/// Number of distinct search-state features.
pub const NUM_STATES: usize = 4;
/// Number of selectable routines.
pub const NUM_ACTIONS: usize = RoutineId::COUNT;

/// Logits are clamped to this range after every update so no action's
/// probability can underflow to zero and the policy can always recover.
pub const LOGIT_CLAMP: f64 = 50.0;

/// Two binary observations of the search: how far the best seen heuristic
/// value is from the initial one, and how much of the budget has elapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchFeature {
    /// False ("near") while the best heuristic value has halved.
    pub far: bool,
    /// False ("early") during the first half of the budget.
    pub late: bool,
}

impl SearchFeature {
    /// Row index into the policy table: `2 * far + late`.
    pub fn index(self) -> usize {
        2 * usize::from(self.far) + usize::from(self.late)
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < NUM_STATES);
        Self { far: index >= 2, late: index % 2 == 1 }
    }

    pub fn label(self) -> &'static str {
        match self.index() {
            0 => "near-early",
            1 => "near-late",
            2 => "far-early",
            _ => "far-late",
        }
    }

    pub fn all() -> [SearchFeature; NUM_STATES] {
        [0, 1, 2, 3].map(SearchFeature::from_index)
    }
}

/// Maps raw search measurements to a feature. Both comparisons are strict:
/// `near` holds iff `h_best < h0 / 2`, `early` iff `elapsed < t_max / 2`.
/// The caller must rule out an infinite `h0` (dead-end initial state) first.
pub fn featurize(h_best: u32, h0: u32, elapsed: f64, t_max: f64) -> SearchFeature {
    debug_assert_ne!(h0, INFINITE_H, "featurize on a dead-end initial state");
    debug_assert!(h_best <= h0);
    let near = 2 * u64::from(h_best) < u64::from(h0);
    let early = elapsed < t_max / 2.0;
    SearchFeature { far: !near, late: !early }
}

/// Per-episode record of routine selections and outcome. The return is set
/// by whoever computes the reward; `None` marks an episode without a defined
/// reward, which must not enter a parameter update.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    /// Selection counts per (feature, routine) pair.
    pub visit_counts: [[u32; NUM_ACTIONS]; NUM_STATES],
    pub return_g: Option<f64>,
    pub solved: bool,
    pub plan_cost: Option<u64>,
    /// Budget units consumed: seconds under a wall clock, expansions under
    /// an expansion budget.
    pub time_used: f64,
}

impl EpisodeRecord {
    pub fn new() -> Self {
        Self {
            visit_counts: [[0; NUM_ACTIONS]; NUM_STATES],
            return_g: None,
            solved: false,
            plan_cost: None,
            time_used: 0.0,
        }
    }

    pub fn record_selection(&mut self, feature: SearchFeature, action: RoutineId) {
        self.visit_counts[feature.index()][action.index()] += 1;
    }

    /// Features with at least one selection.
    pub fn states_visited(&self) -> Vec<SearchFeature> {
        SearchFeature::all()
            .into_iter()
            .filter(|s| self.visit_counts[s.index()].iter().any(|&c| c > 0))
            .collect()
    }
}

impl Default for EpisodeRecord {
    fn default() -> Self {
        Self::new()
    }
}

/// Running average of past returns per feature, used as the REINFORCE
/// baseline. A feature with no recorded returns has value 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BaselineTable {
    sums: [f64; NUM_STATES],
    counts: [u64; NUM_STATES],
}

impl BaselineTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self, feature: SearchFeature) -> f64 {
        let i = feature.index();
        if self.counts[i] == 0 {
            0.0
        } else {
            self.sums[i] / self.counts[i] as f64
        }
    }

    pub fn record(&mut self, feature: SearchFeature, return_g: f64) {
        let i = feature.index();
        self.sums[i] += return_g;
        self.counts[i] += 1;
    }

    pub fn count(&self, feature: SearchFeature) -> u64 {
        self.counts[feature.index()]
    }
}

/// Tabular softmax policy over (feature, routine) with its own RNG stream.
#[derive(Debug, Clone)]
pub struct Policy {
    theta: [[f64; NUM_ACTIONS]; NUM_STATES],
    rng: ChaCha8Rng,
}

impl Policy {
    /// All-zero logits: the uniform policy.
    pub fn uniform(seed: u64) -> Self {
        Self::from_theta([[0.0; NUM_ACTIONS]; NUM_STATES], seed)
    }

    pub fn from_theta(theta: [[f64; NUM_ACTIONS]; NUM_STATES], seed: u64) -> Self {
        Self { theta, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn theta(&self) -> &[[f64; NUM_ACTIONS]; NUM_STATES] {
        &self.theta
    }

    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    /// Softmax of the feature's logit row; sums to 1, all entries positive.
    pub fn action_probs(&self, feature: SearchFeature) -> [f64; NUM_ACTIONS] {
        softmax(&self.theta[feature.index()])
    }

    /// Draws a routine from the softmax distribution, consuming exactly one
    /// RNG event.
    pub fn sample_action(&mut self, feature: SearchFeature) -> RoutineId {
        let probs = self.action_probs(feature);
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return RoutineId::from_index(i);
            }
        }
        RoutineId::from_index(NUM_ACTIONS - 1)
    }

    /// Batched REINFORCE step over episodes that all carry a defined return.
    ///
    /// For every episode, visited pair (s, a) with count n and action b:
    /// `theta[s][b] += alpha / N * n * (G - V(s)) * (1[b == a] - pi(b | s))`,
    /// with the probabilities taken from the pre-update policy and the
    /// baseline frozen at its pre-batch values. Afterwards each episode's
    /// return is folded into the baseline of every feature it visited.
    ///
    /// Returns false (and changes nothing) on an empty batch.
    pub fn reinforce_update(
        &mut self,
        batch: &[EpisodeRecord],
        baseline: &mut BaselineTable,
        alpha: f64,
    ) -> bool {
        if batch.is_empty() {
            return false;
        }
        let n = batch.len() as f64;
        let probs: Vec<[f64; NUM_ACTIONS]> =
            SearchFeature::all().iter().map(|&s| self.action_probs(s)).collect();
        let values: Vec<f64> =
            SearchFeature::all().iter().map(|&s| baseline.value(s)).collect();

        let mut delta = [[0.0; NUM_ACTIONS]; NUM_STATES];
        for record in batch {
            let g = record.return_g.expect("undefined-return episode in update batch");
            for s in 0..NUM_STATES {
                for a in 0..NUM_ACTIONS {
                    let count = record.visit_counts[s][a];
                    if count == 0 {
                        continue;
                    }
                    let advantage = g - values[s];
                    let weight = f64::from(count) * advantage;
                    for b in 0..NUM_ACTIONS {
                        let indicator = if b == a { 1.0 } else { 0.0 };
                        delta[s][b] += weight * (indicator - probs[s][b]);
                    }
                }
            }
        }
        for s in 0..NUM_STATES {
            for b in 0..NUM_ACTIONS {
                self.theta[s][b] =
                    (self.theta[s][b] + alpha / n * delta[s][b]).clamp(-LOGIT_CLAMP, LOGIT_CLAMP);
            }
        }

        for record in batch {
            let g = record.return_g.expect("undefined-return episode in update batch");
            for s in record.states_visited() {
                baseline.record(s, g);
            }
        }
        true
    }
}

fn softmax(logits: &[f64; NUM_ACTIONS]) -> [f64; NUM_ACTIONS] {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; NUM_ACTIONS];
    let mut sum = 0.0;
    for (i, &l) in logits.iter().enumerate() {
        let e = (l - max).exp();
        out[i] = e;
        sum += e;
    }
    for p in &mut out {
        *p /= sum;
    }
    out
}

/// Anything that can pick the next routine given the current feature.
pub trait RoutineSelector {
    fn select(&mut self, feature: SearchFeature) -> RoutineId;
}

/// Always runs the same routine; used for baselines and reference planners.
#[derive(Debug, Clone, Copy)]
pub struct FixedRoutine(pub RoutineId);

impl RoutineSelector for FixedRoutine {
    fn select(&mut self, _feature: SearchFeature) -> RoutineId {
        self.0
    }
}

impl RoutineSelector for Policy {
    fn select(&mut self, feature: SearchFeature) -> RoutineId {
        self.sample_action(feature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S0: SearchFeature = SearchFeature { far: false, late: false };

    #[test]
    fn feature_index_layout() {
        assert_eq!(SearchFeature { far: false, late: false }.index(), 0);
        assert_eq!(SearchFeature { far: false, late: true }.index(), 1);
        assert_eq!(SearchFeature { far: true, late: false }.index(), 2);
        assert_eq!(SearchFeature { far: true, late: true }.index(), 3);
        for i in 0..NUM_STATES {
            assert_eq!(SearchFeature::from_index(i).index(), i);
        }
    }

    #[test]
    fn featurize_uses_strict_halving() {
        let f = featurize(4, 10, 1.0, 5.0);
        assert_eq!(f, SearchFeature { far: false, late: false });

        // 5 is not strictly below 10/2.
        assert!(featurize(5, 10, 1.0, 5.0).far);
        // Elapsed exactly half the budget counts as late.
        assert!(featurize(4, 10, 2.5, 5.0).late);
        // h0 == 0 pins the distance feature to far.
        assert!(featurize(0, 0, 0.0, 5.0).far);
    }

    #[test]
    fn zero_logits_give_uniform_probs() {
        let policy = Policy::uniform(0);
        for s in SearchFeature::all() {
            for p in policy.action_probs(s) {
                assert!((p - 0.2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn softmax_is_shift_invariant() {
        let mut theta = [[0.0; NUM_ACTIONS]; NUM_STATES];
        theta[0] = [7.5; NUM_ACTIONS];
        theta[2] = [-3.25; NUM_ACTIONS];
        let policy = Policy::from_theta(theta, 0);
        for s in [SearchFeature::from_index(0), SearchFeature::from_index(2)] {
            for p in policy.action_probs(s) {
                assert!((p - 0.2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_unit_logit_probs() {
        let mut theta = [[0.0; NUM_ACTIONS]; NUM_STATES];
        theta[0][0] = 1.0;
        let policy = Policy::from_theta(theta, 0);
        let probs = policy.action_probs(S0);
        let e = std::f64::consts::E;
        assert!((probs[0] - e / (e + 4.0)).abs() < 1e-12);
        assert!((probs[0] - 0.4046).abs() < 1e-4);
        for p in &probs[1..] {
            assert!((p - 1.0 / (e + 4.0)).abs() < 1e-12);
            assert!((p - 0.1488).abs() < 1e-4);
        }
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let mut a = Policy::uniform(7);
        let mut b = Policy::uniform(7);
        let seq_a: Vec<_> = (0..64).map(|_| a.sample_action(S0)).collect();
        let seq_b: Vec<_> = (0..64).map(|_| b.sample_action(S0)).collect();
        assert_eq!(seq_a, seq_b);
    }

    #[test]
    fn near_degenerate_row_always_picks_first() {
        let mut theta = [[-30.0; NUM_ACTIONS]; NUM_STATES];
        theta[0][0] = 30.0;
        let mut policy = Policy::from_theta(theta, 3);
        for _ in 0..100_000 {
            assert_eq!(policy.sample_action(S0), RoutineId::from_index(0));
        }
    }

    fn one_shot_record(state: SearchFeature, action: usize, g: f64) -> EpisodeRecord {
        let mut rec = EpisodeRecord::new();
        rec.visit_counts[state.index()][action] = 1;
        rec.return_g = Some(g);
        rec
    }

    #[test]
    fn hand_computed_single_episode_update() {
        let mut policy = Policy::uniform(0);
        let mut baseline = BaselineTable::new();
        // Uniform policy, one visit to action 0, advantage G - V = 1.
        let applied =
            policy.reinforce_update(&[one_shot_record(S0, 0, 1.0)], &mut baseline, 0.02);
        assert!(applied);
        let row = policy.theta()[0];
        assert!((row[0] - 0.02 * 0.8).abs() < 1e-15);
        for b in 1..NUM_ACTIONS {
            assert!((row[b] - (-0.02 * 0.2)).abs() < 1e-15);
        }
        // The chosen action's probability strictly increases.
        assert!(policy.action_probs(S0)[0] > 0.2);
        // The return was folded into the baseline afterwards.
        assert_eq!(baseline.count(S0), 1);
        assert!((baseline.value(S0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_advantage_is_a_no_op() {
        let mut policy = Policy::uniform(0);
        let mut baseline = BaselineTable::new();
        baseline.record(S0, 0.75);
        let before = *policy.theta();
        policy.reinforce_update(&[one_shot_record(S0, 2, 0.75)], &mut baseline, 0.02);
        assert_eq!(*policy.theta(), before);
    }

    #[test]
    fn empty_batch_is_signaled() {
        let mut policy = Policy::uniform(0);
        let mut baseline = BaselineTable::new();
        let before = *policy.theta();
        assert!(!policy.reinforce_update(&[], &mut baseline, 0.02));
        assert_eq!(*policy.theta(), before);
        assert_eq!(baseline.count(S0), 0);
    }

    #[test]
    fn visit_counts_scale_the_update() {
        let mut single = Policy::uniform(0);
        let mut triple = Policy::uniform(0);
        let mut b1 = BaselineTable::new();
        let mut b3 = BaselineTable::new();
        let mut rec3 = one_shot_record(S0, 1, 1.0);
        rec3.visit_counts[S0.index()][1] = 3;
        single.reinforce_update(&[one_shot_record(S0, 1, 1.0)], &mut b1, 0.02);
        triple.reinforce_update(&[rec3], &mut b3, 0.02);
        for b in 0..NUM_ACTIONS {
            assert!((triple.theta()[0][b] - 3.0 * single.theta()[0][b]).abs() < 1e-15);
        }
    }

    #[test]
    fn logits_stay_clamped() {
        let mut policy = Policy::uniform(0);
        let mut baseline = BaselineTable::new();
        for _ in 0..100 {
            let rec = one_shot_record(S0, 0, 1e6);
            policy.reinforce_update(&[rec], &mut baseline, 10.0);
        }
        for row in policy.theta() {
            for &t in row {
                assert!(t.abs() <= LOGIT_CLAMP);
            }
        }
        let probs = policy.action_probs(S0);
        assert!(probs.iter().all(|&p| p > 0.0));
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    /// Empirical mean REINFORCE step in a one-state bandit points along the
    /// true policy gradient.
    #[test]
    fn mean_update_aligns_with_true_gradient() {
        use rand::SeedableRng;
        let rewards = [1.0, 0.2, 0.4, 0.2, 0.2];
        let mut theta = [[0.0; NUM_ACTIONS]; NUM_STATES];
        theta[0] = [0.3, -0.2, 0.1, 0.0, -0.4];
        let base_policy = Policy::from_theta(theta, 0);
        let probs = base_policy.action_probs(S0);

        // True gradient of expected reward: pi_b * (r_b - sum pi r).
        let mean_r: f64 = probs.iter().zip(rewards).map(|(p, r)| p * r).sum();
        let true_grad: Vec<f64> =
            (0..NUM_ACTIONS).map(|b| probs[b] * (rewards[b] - mean_r)).collect();

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut mean_delta = [0.0f64; NUM_ACTIONS];
        let batches = 10_000;
        for _ in 0..batches {
            let mut policy = base_policy.clone();
            policy.reseed(rng.gen());
            let batch: Vec<EpisodeRecord> = (0..5)
                .map(|_| {
                    let a = policy.sample_action(S0);
                    one_shot_record(S0, a.index(), rewards[a.index()])
                })
                .collect();
            let mut scratch = base_policy.clone();
            let mut baseline = BaselineTable::new();
            scratch.reinforce_update(&batch, &mut baseline, 0.02);
            for b in 0..NUM_ACTIONS {
                mean_delta[b] += scratch.theta()[0][b] - base_policy.theta()[0][b];
            }
        }
        let inner: f64 =
            (0..NUM_ACTIONS).map(|b| mean_delta[b] / batches as f64 * true_grad[b]).sum();
        assert!(inner > 0.0, "mean update direction opposes the true gradient: {inner}");
    }
}
