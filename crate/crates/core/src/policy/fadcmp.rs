use rand::RngCore;
use serde::Serialize;

use super::Policy;
use crate::error::{Error, Result};
use crate::model::{Catalog, DiscountCurve, Slate};
use crate::optimizer::optimal_slate;
use crate::simulator::{extract_events, InteractionRecord};

/// Optimistic relevance index: `sum / exposures + sqrt(2 log t / exposures)`,
/// or 1 for an item never examined.
pub fn fadcmp_ucb_value(exposures: u64, weighted_clicks: f64, log_t: f64) -> f64 {
    if exposures == 0 {
        return 1.0;
    }
    let n = exposures as f64;
    weighted_clicks / n + (2.0 * log_t / n).sqrt()
}

/// UCB policy for a known discount curve.
///
/// Every examined position is an unbiased draw of the item's relevance once
/// the click is reweighted by `1 / f(h)`, so all exposures count toward the
/// estimate regardless of where the item was shown.
#[derive(Debug, Clone, Serialize)]
pub struct FaDcmPPolicy {
    catalog: Catalog,
    discount: DiscountCurve,
    max_len: Option<usize>,
    exposures: Vec<u64>,
    weighted_clicks: Vec<f64>,
    u_ucb: Vec<f64>,
    rounds_observed: u64,
}

impl FaDcmPPolicy {
    pub fn new(catalog: Catalog, discount: DiscountCurve, max_len: Option<usize>) -> Self {
        let n = catalog.n_items();
        Self {
            catalog,
            discount,
            max_len,
            exposures: vec![0; n],
            weighted_clicks: vec![0.0; n],
            u_ucb: vec![1.0; n],
            rounds_observed: 0,
        }
    }

    /// Upper confidence bounds at time `t`.
    pub fn ucb(&self, t: u64) -> Vec<f64> {
        self.ucb_at_log((t.max(1) as f64).ln())
    }

    pub fn ucb_at_log(&self, log_t: f64) -> Vec<f64> {
        self.exposures
            .iter()
            .zip(&self.weighted_clicks)
            .map(|(&n, &s)| fadcmp_ucb_value(n, s, log_t))
            .collect()
    }

    /// Point estimates `sum(z / f) / T_j`; `None` for unexamined items.
    pub fn estimates(&self) -> Vec<Option<f64>> {
        self.exposures
            .iter()
            .zip(&self.weighted_clicks)
            .map(|(&n, &s)| (n > 0).then(|| s / n as f64))
            .collect()
    }

    pub fn exposures(&self) -> &[u64] {
        &self.exposures
    }

    pub fn weighted_clicks(&self) -> &[f64] {
        &self.weighted_clicks
    }

    pub fn rounds_observed(&self) -> u64 {
        self.rounds_observed
    }
}

impl Policy for FaDcmPPolicy {
    fn name(&self) -> &'static str {
        "fa-dcm-p"
    }

    fn select_slate(&mut self, _t: u64, _rng: &mut dyn RngCore) -> Result<Slate> {
        // u_ucb was refreshed at the end of round t-1
        optimal_slate(&self.catalog, &self.u_ucb, &self.discount, self.max_len)
    }

    fn observe(&mut self, record: &InteractionRecord) -> Result<()> {
        let events = extract_events(record, &self.catalog)?;
        for ev in &events {
            let f = self.discount.get(ev.discount_index);
            if f <= 0.0 {
                return Err(Error::ModelDegenerate(format!(
                    "f({}) = 0; clicks at this discount index carry no relevance signal",
                    ev.discount_index
                )));
            }
        }
        for ev in events {
            self.exposures[ev.item_id] += 1;
            if ev.click {
                self.weighted_clicks[ev.item_id] += 1.0 / self.discount.get(ev.discount_index);
            }
        }
        self.rounds_observed += 1;
        self.u_ucb = self.ucb(self.rounds_observed);
        Ok(())
    }

    fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
