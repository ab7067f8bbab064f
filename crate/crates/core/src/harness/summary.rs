use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::ReplicationOutcome;

/// Cross-replication aggregate of cumulative regret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub policy: String,
    pub case_label: String,
    pub checkpoints: Vec<u64>,
    pub mean_cum_regret: Vec<f64>,
    pub lo95: Vec<f64>,
    pub hi95: Vec<f64>,
    /// Final cumulative regret of each replication, in replication order.
    pub finals: Vec<f64>,
    pub mean_final: f64,
    pub mean_realized_clicks: f64,
}

impl SummaryStats {
    /// Mean cumulative regret at checkpoint `t`, if `t` is a checkpoint.
    pub fn mean_at(&self, t: u64) -> Option<f64> {
        self.checkpoints
            .iter()
            .position(|&c| c == t)
            .map(|k| self.mean_cum_regret[k])
    }
}

/// Rounds `every, 2*every, ...` up to the horizon, always ending at it.
pub fn checkpoints(horizon: u64, every: u64) -> Vec<u64> {
    let every = every.max(1);
    let mut out: Vec<u64> = (1..=horizon / every).map(|k| k * every).collect();
    if out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

/// Linear-interpolation percentile of already sorted values, `p` in `[0, 1]`.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = p.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn summarize(config: &ExperimentConfig, outcomes: &[ReplicationOutcome]) -> SummaryStats {
    let cps = checkpoints(config.horizon, config.checkpoint_every);
    let mut mean_cum_regret = Vec::with_capacity(cps.len());
    let mut lo95 = Vec::with_capacity(cps.len());
    let mut hi95 = Vec::with_capacity(cps.len());
    for &t in &cps {
        let mut vals: Vec<f64> = outcomes.iter().map(|o| o.regret.at(t)).collect();
        let m = mean(&vals);
        vals.sort_by(f64::total_cmp);
        // heavily skewed samples can push the mean outside the percentile band
        lo95.push(percentile_sorted(&vals, 0.025).min(m));
        hi95.push(percentile_sorted(&vals, 0.975).max(m));
        mean_cum_regret.push(m);
    }
    let finals: Vec<f64> = outcomes.iter().map(|o| o.regret.final_regret()).collect();
    let clicks: Vec<f64> = outcomes.iter().map(|o| o.realized_clicks as f64).collect();
    SummaryStats {
        policy: config.policy.label().to_string(),
        case_label: config.case_label.clone(),
        checkpoints: cps,
        mean_cum_regret,
        lo95,
        hi95,
        mean_final: mean(&finals),
        finals,
        mean_realized_clicks: mean(&clicks),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(300, 100), vec![100, 200, 300]);
        assert_eq!(checkpoints(250, 100), vec![100, 200, 250]);
        assert_eq!(checkpoints(50, 100), vec![50]);
    }

    #[test]
    fn percentiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile_sorted(&v, 0.5), 3.0);
        assert_eq!(percentile_sorted(&v, 0.0), 1.0);
        assert_eq!(percentile_sorted(&v, 1.0), 5.0);
        assert!((percentile_sorted(&v, 0.975) - 4.9).abs() < 1e-12);
        assert_eq!(percentile_sorted(&[7.0], 0.025), 7.0);
    }
}
