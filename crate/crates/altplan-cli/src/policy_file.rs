//! Plain-text persistence for trained policies: a version tag, training
//! metadata and the 4x5 logit table. Floats are written with Rust's shortest
//! round-trip formatting, so save/load is lossless.

use std::fs;
use std::path::Path;

use altplan_core::strategy::{SearchFeature, NUM_ACTIONS, NUM_STATES};
use anyhow::{anyhow, bail, Context, Result};

pub const POLICY_FORMAT_TAG: &str = "altplan-policy v1";

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyMeta {
    /// Reward the policy was trained with ("ipc", "ipc2", "time", or
    /// "none" for hand-written files).
    pub reward: String,
    pub alpha: f64,
    pub seed: u64,
    pub episodes: u64,
    pub updates: u64,
    /// Problem set the policy was trained on.
    pub trained_on: String,
    /// Routine selections per search state over the whole training run.
    pub state_visits: [u64; NUM_STATES],
}

impl Default for PolicyMeta {
    fn default() -> Self {
        Self {
            reward: "none".into(),
            alpha: 0.0,
            seed: 0,
            episodes: 0,
            updates: 0,
            trained_on: String::new(),
            state_visits: [0; NUM_STATES],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyFile {
    pub theta: [[f64; NUM_ACTIONS]; NUM_STATES],
    pub meta: PolicyMeta,
}

impl PolicyFile {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(POLICY_FORMAT_TAG);
        out.push('\n');
        out.push_str(&format!("reward {}\n", self.meta.reward));
        out.push_str(&format!("alpha {}\n", self.meta.alpha));
        out.push_str(&format!("seed {}\n", self.meta.seed));
        out.push_str(&format!("episodes {}\n", self.meta.episodes));
        out.push_str(&format!("updates {}\n", self.meta.updates));
        out.push_str(&format!("trained-on {}\n", self.meta.trained_on));
        let visits: Vec<String> =
            self.meta.state_visits.iter().map(u64::to_string).collect();
        out.push_str(&format!("visits {}\n", visits.join(" ")));
        for s in SearchFeature::all() {
            let row: Vec<String> =
                self.theta[s.index()].iter().map(f64::to_string).collect();
            out.push_str(&format!("theta {} {}\n", s.label(), row.join(" ")));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let tag = lines.next().unwrap_or("");
        if tag.trim() != POLICY_FORMAT_TAG {
            bail!("not a policy file (expected `{POLICY_FORMAT_TAG}`, found `{tag}`)");
        }
        let mut meta = PolicyMeta::default();
        let mut theta = [[f64::NAN; NUM_ACTIONS]; NUM_STATES];
        let mut rows_seen = [false; NUM_STATES];
        for raw in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) =
                line.split_once(' ').ok_or_else(|| anyhow!("malformed line `{line}`"))?;
            match key {
                "reward" => meta.reward = rest.trim().to_string(),
                "alpha" => meta.alpha = rest.trim().parse().context("alpha")?,
                "seed" => meta.seed = rest.trim().parse().context("seed")?,
                "episodes" => meta.episodes = rest.trim().parse().context("episodes")?,
                "updates" => meta.updates = rest.trim().parse().context("updates")?,
                "trained-on" => meta.trained_on = rest.trim().to_string(),
                "visits" => {
                    let parts: Vec<u64> = rest
                        .split_whitespace()
                        .map(|p| p.parse().context("visits"))
                        .collect::<Result<_>>()?;
                    if parts.len() != NUM_STATES {
                        bail!("visits line must carry {NUM_STATES} counts");
                    }
                    meta.state_visits.copy_from_slice(&parts);
                }
                "theta" => {
                    let (label, nums) = rest
                        .split_once(' ')
                        .ok_or_else(|| anyhow!("malformed theta line `{line}`"))?;
                    let state = SearchFeature::all()
                        .into_iter()
                        .find(|s| s.label() == label)
                        .ok_or_else(|| anyhow!("unknown state label `{label}`"))?;
                    let row: Vec<f64> = nums
                        .split_whitespace()
                        .map(|p| p.parse().context("theta value"))
                        .collect::<Result<_>>()?;
                    if row.len() != NUM_ACTIONS {
                        bail!(
                            "theta row `{label}` has {} entries, expected {NUM_ACTIONS}",
                            row.len()
                        );
                    }
                    theta[state.index()].copy_from_slice(&row);
                    rows_seen[state.index()] = true;
                }
                other => bail!("unknown policy-file key `{other}`"),
            }
        }
        for (i, seen) in rows_seen.iter().enumerate() {
            if !seen {
                bail!("missing theta row `{}`", SearchFeature::from_index(i).label());
            }
        }
        Ok(Self { theta, meta })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())
            .with_context(|| format!("writing policy file {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading policy file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing policy file {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PolicyFile {
        let mut theta = [[0.0; NUM_ACTIONS]; NUM_STATES];
        theta[0] = [0.1, -0.25, 3.5e-7, 49.999999, -50.0];
        theta[3] = [1.0 / 3.0, 0.0, -0.0, 2.5, f64::MIN_POSITIVE];
        PolicyFile {
            theta,
            meta: PolicyMeta {
                reward: "ipc".into(),
                alpha: 0.02,
                seed: 99,
                episodes: 1234,
                updates: 246,
                trained_on: "problems/delivery".into(),
                state_visits: [10, 20, 30, 40],
            },
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let original = sample();
        let parsed = PolicyFile::parse(&original.render()).unwrap();
        assert_eq!(original, parsed);
        assert_eq!(original.render(), parsed.render());
    }

    #[test]
    fn wrong_shapes_are_rejected() {
        let text = sample().render();
        let short_row = text.replace("theta near-early 0.1 -0.25", "theta near-early 0.1");
        assert!(PolicyFile::parse(&short_row).is_err());

        let missing_row: String =
            text.lines().filter(|l| !l.starts_with("theta near-late")).map(|l| format!("{l}\n")).collect();
        assert!(PolicyFile::parse(&missing_row).is_err());

        assert!(PolicyFile::parse("altplan-policy v2\n").is_err());
        assert!(PolicyFile::parse("").is_err());
    }
}
