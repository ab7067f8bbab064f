//! The policy-versus-environment loop and replication fan-out.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::summary::{summarize, SummaryStats};
use crate::error::{Error, Result};
use crate::model::{expected_reward, ModelParams, Slate};
use crate::policy::{oracle_select, Policy};
use crate::simulator::{simulate_session, InteractionRecord};

/// Stream ids carved out of each replication's ChaCha8 generator.
const TRUTH_STREAM: u64 = 0;
const SESSION_STREAM: u64 = 1;
const POLICY_STREAM: u64 = 2;

/// SplitMix64 finalizer; spreads `(master_seed, replication)` over the key space.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seed(master_seed: u64, replication: usize) -> u64 {
    mix(mix(master_seed) ^ replication as u64)
}

/// Independent generator for one purpose within one replication.
pub fn replication_rng(master_seed: u64, replication: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(master_seed, replication));
    rng.set_stream(stream);
    rng
}

/// Expected-reward gap between the optimal slate (of the same length bound)
/// and `offered`.
pub fn instantaneous_regret(
    truth: &ModelParams,
    offered: &Slate,
    max_len: Option<usize>,
) -> Result<f64> {
    let best = oracle_select(truth, max_len)?;
    Ok(expected_reward(&best, truth)? - expected_reward(offered, truth)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretSeries {
    pub instantaneous: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl RegretSeries {
    fn with_capacity(n: usize) -> Self {
        Self {
            instantaneous: Vec::with_capacity(n),
            cumulative: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, r: f64) {
        let prev = self.cumulative.last().copied().unwrap_or(0.0);
        self.instantaneous.push(r);
        self.cumulative.push(prev + r);
    }

    pub fn final_regret(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Cumulative regret after round `t` (1-based).
    pub fn at(&self, t: u64) -> f64 {
        self.cumulative[(t as usize).min(self.cumulative.len()) - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub replication: usize,
    pub regret: RegretSeries,
    pub realized_clicks: u64,
    pub optimal_reward: f64,
}

pub fn run_replication(config: &ExperimentConfig, replication: usize) -> Result<ReplicationOutcome> {
    run_replication_with(config, replication, |_, _| {}).map(|(o, _)| o)
}

/// Runs one replication, calling `on_session(t, record)` after every round.
/// Also returns the final policy so callers can snapshot it.
pub fn run_replication_with(
    config: &ExperimentConfig,
    replication: usize,
    mut on_session: impl FnMut(u64, &InteractionRecord),
) -> Result<(ReplicationOutcome, Box<dyn Policy>)> {
    config.validate()?;
    let seed = config.master_seed;
    let truth = config.draw_truth(&mut replication_rng(seed, replication, TRUTH_STREAM))?;
    let mut session_rng = replication_rng(seed, replication, SESSION_STREAM);
    let mut policy_rng = replication_rng(seed, replication, POLICY_STREAM);

    let mut policy = config.policy.build(&truth, config.max_len)?;
    let best = oracle_select(&truth, config.max_len)?;
    let optimal_reward = expected_reward(&best, &truth)?;

    let mut regret = RegretSeries::with_capacity(config.horizon as usize);
    let mut realized_clicks = 0u64;
    for t in 1..=config.horizon {
        let slate = policy.select_slate(t, &mut policy_rng)?;
        if config.max_len.is_some_and(|l| slate.len() > l) {
            return Err(Error::InvalidSlate(format!(
                "policy {} offered {} items, limit is {:?}",
                policy.name(),
                slate.len(),
                config.max_len
            )));
        }
        let gap = optimal_reward - expected_reward(&slate, &truth)?;
        // tied slates differ from the optimum only by rounding
        regret.push(gap.max(0.0));

        let record = simulate_session(&slate, &truth, &mut session_rng)?;
        realized_clicks += record.realized_clicks as u64;
        on_session(t, &record);
        policy.observe(&record)?;
    }

    Ok((
        ReplicationOutcome {
            replication,
            regret,
            realized_clicks,
            optimal_reward,
        },
        policy,
    ))
}

/// Runs every replication of `config` on the current rayon pool and keeps
/// the outcomes in replication order.
pub fn run_replications(config: &ExperimentConfig) -> Result<Vec<ReplicationOutcome>> {
    config.validate()?;
    (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect()
}

/// Runs all replications (on at most `jobs` threads when given) and
/// aggregates them at the configured checkpoints.
pub fn run_experiment(config: &ExperimentConfig, jobs: Option<usize>) -> Result<SummaryStats> {
    let outcomes = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::param("jobs", e.to_string()))?
            .install(|| run_replications(config))?,
        None => run_replications(config)?,
    };
    Ok(summarize(config, &outcomes))
}
