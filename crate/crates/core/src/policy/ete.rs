use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{curve_from_estimate, monotone_repair, EventTable, Policy};
use crate::error::{Error, Result};
use crate::model::{Catalog, Slate};
use crate::optimizer::optimal_slate;
use crate::simulator::{extract_events, InteractionRecord};

/// Floor on relevance estimates when dividing clicks by them.
const RELEVANCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EteConfig {
    /// Exploration budget: by round `t`, at least `beta * ln t` rounds explore.
    pub beta: f64,
    /// Discount plateau index; defaults to the number of items.
    pub plateau: Option<usize>,
}

impl Default for EteConfig {
    fn default() -> Self {
        Self {
            beta: 50.0,
            plateau: None,
        }
    }
}

impl EteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::param("policy.beta", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Explore-then-exploit benchmark.
///
/// Exploration rounds show a uniformly random permutation. Exploitation
/// rounds plug empirical means of relevance and discount into the offline
/// optimizer without any confidence bonus.
#[derive(Debug, Clone, Serialize)]
pub struct EtePolicy {
    catalog: Catalog,
    config: EteConfig,
    max_len: Option<usize>,
    events: EventTable,
    exploration_rounds: u64,
    rounds_observed: u64,
}

impl EtePolicy {
    pub fn new(catalog: Catalog, config: EteConfig, max_len: Option<usize>) -> Self {
        let n = catalog.n_items();
        let plateau = config.plateau.unwrap_or(n).max(1);
        Self {
            catalog,
            config,
            max_len,
            events: EventTable::new(n, plateau),
            exploration_rounds: 0,
            rounds_observed: 0,
        }
    }

    pub fn exploration_rounds(&self) -> u64 {
        self.exploration_rounds
    }

    /// Round 1 always explores; afterwards explore while fewer than
    /// `beta * ln t` exploration rounds have happened.
    pub fn is_exploration_round(&self, t: u64) -> bool {
        t <= 1 || (self.exploration_rounds as f64) < self.config.beta * (t as f64).ln()
    }

    /// Empirical relevance (first-of-category click rate, 1 if unseen).
    pub fn relevance_estimates(&self) -> Vec<f64> {
        self.events
            .first_of_category_means()
            .into_iter()
            .map(|u| u.unwrap_or(1.0))
            .collect()
    }

    /// Plug-in discount estimate, clipped to `[0, 1]` and repaired; unseen
    /// indices default to 1 before repair.
    pub fn discount_estimates(&self) -> Vec<f64> {
        let u_hat = self.relevance_estimates();
        let n = self.catalog.n_items();
        let plateau = self.events.plateau();
        let mut f = vec![1.0; plateau + 1];
        for (i, fi) in f.iter_mut().enumerate().skip(1) {
            let total = self.events.index_total(i);
            if total == 0 {
                continue;
            }
            let s: f64 = (0..n)
                .map(|j| self.events.clicks(i, j) as f64 / u_hat[j].max(RELEVANCE_FLOOR))
                .sum();
            *fi = (s / total as f64).clamp(0.0, 1.0);
        }
        monotone_repair(f)
    }
}

impl Policy for EtePolicy {
    fn name(&self) -> &'static str {
        "ete"
    }

    fn select_slate(&mut self, t: u64, rng: &mut dyn RngCore) -> Result<Slate> {
        let mut order = if self.is_exploration_round(t) {
            self.exploration_rounds += 1;
            let mut all: Vec<usize> = (0..self.catalog.n_items()).collect();
            all.shuffle(rng);
            all
        } else {
            let curve = curve_from_estimate(self.discount_estimates())?;
            optimal_slate(&self.catalog, &self.relevance_estimates(), &curve, None)?.into_inner()
        };
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
        Ok(())
    }

    fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
