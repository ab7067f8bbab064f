use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{curve_from_estimate, monotone_repair, move_to_front, EventTable, Policy};
use crate::error::{Error, Result};
use crate::model::{Catalog, Slate};
use crate::optimizer::optimal_slate;
use crate::simulator::{extract_events, InteractionRecord};

/// How the relevance-uncertainty part of the discount bonus is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BonusForm {
    /// `(1 - eps/u_hat)^-1`, gated on `u_hat > eps`; dominates the deviation
    /// of `1/u_hat` from `1/u`.
    #[default]
    Inverse,
    /// `(1 - eps/u_hat)`, gated on `u_hat >= eps`.
    Printed,
}

/// Which exposure count is compared against the forced-exploration threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplorationCount {
    /// Exposures as the first item of its category (the only ones that feed
    /// the relevance estimate).
    #[default]
    FirstOfCategory,
    /// Every exposure at any discount index.
    AllExposures,
}

/// Forced exploration threshold `alpha * base^(2/3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSchedule {
    /// `base` is the current round.
    #[default]
    Anytime,
    /// `base` is a fixed horizon.
    FixedHorizon(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaDcmConfig {
    pub alpha: f64,
    /// Discount plateau index `M`; defaults to the number of items.
    pub plateau: Option<usize>,
    pub bonus_form: BonusForm,
    pub exploration_count: ExplorationCount,
    pub threshold: ThresholdSchedule,
}

impl Default for FaDcmConfig {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            plateau: None,
            bonus_form: BonusForm::Inverse,
            exploration_count: ExplorationCount::FirstOfCategory,
            threshold: ThresholdSchedule::Anytime,
        }
    }
}

impl FaDcmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("policy.alpha", "must be finite and >= 0"));
        }
        if let ThresholdSchedule::FixedHorizon(0) = self.threshold {
            return Err(Error::param("policy.threshold", "fixed horizon must be >= 1"));
        }
        Ok(())
    }
}

/// UCB policy learning both relevance and the discount curve.
///
/// Relevance is estimated only from first-of-category exposures (where the
/// discount is exactly 1). The discount at index `i` is estimated by
/// dividing clicks at that index by the current relevance estimates. Items
/// with too few first-of-category exposures are forced to the front of the
/// slate, one per round.
#[derive(Debug, Clone, Serialize)]
pub struct FaDcmPolicy {
    catalog: Catalog,
    config: FaDcmConfig,
    max_len: Option<usize>,
    events: EventTable,
    u_ucb: Vec<f64>,
    f_ucb: Vec<f64>,
    rounds_observed: u64,
    forced_rounds: u64,
}

impl FaDcmPolicy {
    pub fn new(catalog: Catalog, config: FaDcmConfig, max_len: Option<usize>) -> Self {
        let n = catalog.n_items();
        let plateau = config.plateau.unwrap_or(n).max(1);
        Self {
            catalog,
            config,
            max_len,
            events: EventTable::new(n, plateau),
            u_ucb: vec![1.0; n],
            f_ucb: vec![1.0; plateau + 1],
            rounds_observed: 0,
            forced_rounds: 0,
        }
    }

    pub fn events(&self) -> &EventTable {
        &self.events
    }

    pub fn config(&self) -> &FaDcmConfig {
        &self.config
    }

    pub fn rounds_observed(&self) -> u64 {
        self.rounds_observed
    }

    pub fn forced_rounds(&self) -> u64 {
        self.forced_rounds
    }

    /// Current (repaired) optimistic discount curve.
    pub fn f_ucb(&self) -> &[f64] {
        &self.f_ucb
    }

    pub fn u_ucb(&self) -> &[f64] {
        &self.u_ucb
    }

    /// Point estimates of relevance from first-of-category clicks.
    pub fn relevance_estimates(&self) -> Vec<Option<f64>> {
        self.events.first_of_category_means()
    }

    /// Point estimates of `f(i)` using the current relevance estimates;
    /// `None` where index `i` has no events.
    pub fn discount_estimates(&self) -> Vec<Option<f64>> {
        let u_hat = self.relevance_estimates();
        (0..=self.events.plateau())
            .map(|i| {
                let total = self.events.index_total(i);
                (total > 0).then(|| self.weighted_sum(i, &u_hat) / total as f64)
            })
            .collect()
    }

    /// `(1/T_i) * sum_j clicks_ij / u_j` with the true relevance plugged in.
    pub fn plug_in_discount(&self, true_u: &[f64]) -> Vec<Option<f64>> {
        (0..=self.events.plateau())
            .map(|i| {
                let total = self.events.index_total(i);
                (total > 0).then(|| {
                    let s: f64 = true_u
                        .iter()
                        .enumerate()
                        .filter(|(_, &u)| u > 0.0)
                        .map(|(j, &u)| self.events.clicks(i, j) as f64 / u)
                        .sum();
                    s / total as f64
                })
            })
            .collect()
    }

    fn weighted_sum(&self, i: usize, u_hat: &[Option<f64>]) -> f64 {
        u_hat
            .iter()
            .enumerate()
            .filter_map(|(j, u)| match u {
                Some(u) if *u > 0.0 => Some(self.events.clicks(i, j) as f64 / u),
                _ => None,
            })
            .sum()
    }

    /// Unrepaired optimistic indices `(u_ucb, f_ucb)` at time `t`.
    pub fn ucb(&self, t: u64) -> (Vec<f64>, Vec<f64>) {
        self.ucb_at_log((t.max(1) as f64).ln())
    }

    pub fn ucb_at_log(&self, log_t: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.catalog.n_items();
        let plateau = self.events.plateau();
        let u_hat = self.relevance_estimates();

        let mut u_ucb = vec![1.0; n];
        // relevance radius sqrt(log t / T_0j), reused by the discount bonus
        let mut radius = vec![f64::NAN; n];
        for j in 0..n {
            let t0 = self.events.count(0, j);
            if let Some(u) = u_hat[j] {
                radius[j] = (log_t / t0 as f64).sqrt();
                u_ucb[j] = u + (2.0 * log_t / t0 as f64).sqrt();
            }
        }

        let mut f_ucb = vec![1.0; plateau + 1];
        let last = self.events.max_index_seen().unwrap_or(0);
        for (i, f) in f_ucb.iter_mut().enumerate().take(last + 1).skip(1) {
            let total = self.events.index_total(i);
            if total == 0 {
                continue;
            }
            let total = total as f64;
            let mut f_hat = 0.0;
            let mut relevance_bonus = 0.0;
            for j in 0..n {
                let clicks = self.events.clicks(i, j);
                let Some(u) = u_hat[j] else { continue };
                if clicks == 0 || u <= 0.0 {
                    continue;
                }
                let clicks = clicks as f64;
                f_hat += clicks / u;
                let eps = radius[j];
                let scale = match self.config.bonus_form {
                    BonusForm::Inverse if u > eps => 1.0 / (1.0 - eps / u),
                    BonusForm::Printed if u >= eps => 1.0 - eps / u,
                    _ => continue,
                };
                relevance_bonus += clicks / total / (u * u) * scale * eps;
            }
            *f = f_hat / total + relevance_bonus + (log_t / total).sqrt();
        }
        (u_ucb, f_ucb)
    }

    fn exploration_threshold(&self, t: u64) -> f64 {
        let base = match self.config.threshold {
            ThresholdSchedule::Anytime => t,
            ThresholdSchedule::FixedHorizon(h) => h,
        };
        self.config.alpha * (base as f64).powf(2.0 / 3.0)
    }

    fn exploration_count(&self, item: usize) -> u64 {
        match self.config.exploration_count {
            ExplorationCount::FirstOfCategory => self.events.count(0, item),
            ExplorationCount::AllExposures => self.events.item_total(item),
        }
    }

    /// The item with the fewest exposures among those below the threshold at
    /// round `t` (ties to the smaller id).
    pub fn most_deficient_item(&self, t: u64) -> Option<usize> {
        let threshold = self.exploration_threshold(t);
        (0..self.catalog.n_items())
            .map(|j| (self.exploration_count(j), j))
            .filter(|&(c, _)| (c as f64) < threshold)
            .min()
            .map(|(_, j)| j)
    }
}

impl Policy for FaDcmPolicy {
    fn name(&self) -> &'static str {
        "fa-dcm"
    }

    fn select_slate(&mut self, t: u64, _rng: &mut dyn RngCore) -> Result<Slate> {
        let curve = curve_from_estimate(self.f_ucb.clone())?;
        let mut order = optimal_slate(&self.catalog, &self.u_ucb, &curve, None)?.into_inner();
        if let Some(item) = self.most_deficient_item(t) {
            move_to_front(&mut order, item);
            self.forced_rounds += 1;
        }
        if let Some(l) = self.max_len {
            order.truncate(l);
        }
        Ok(Slate::from_unique(order))
    }

    fn observe(&mut self, record: &InteractionRecord) -> Result<()> {
        for ev in extract_events(record, &self.catalog)? {
            self.events.record(ev.discount_index, ev.item_id, ev.click);
        }
        self.rounds_observed += 1;
        let (u_ucb, f_raw) = self.ucb(self.rounds_observed);
        self.u_ucb = u_ucb;
        self.f_ucb = monotone_repair(f_raw);
        Ok(())
    }

    fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
