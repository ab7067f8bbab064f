//! Learning policies. Each round the harness asks a policy for a slate, plays
//! it against the simulated user, and hands the resulting record back.

mod ete;
mod fadcm;
mod fadcmp;
mod oracle;

pub use ete::{EteConfig, EtePolicy};
pub use fadcm::{BonusForm, ExplorationCount, FaDcmConfig, FaDcmPolicy, ThresholdSchedule};
pub use fadcmp::{fadcmp_ucb_value, FaDcmPPolicy};
pub use oracle::{oracle_select, OraclePolicy};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DiscountCurve, ModelParams, Slate};
use crate::simulator::InteractionRecord;

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    /// Slate for round `t` (1-based), computed from feedback of rounds `1..t`.
    fn select_slate(&mut self, t: u64, rng: &mut dyn RngCore) -> Result<Slate>;

    /// Feedback for the slate most recently returned by `select_slate`.
    fn observe(&mut self, record: &InteractionRecord) -> Result<()>;

    /// Debug dump of the sufficient statistics.
    fn snapshot(&self) -> serde_json::Value;
}

/// Which policy to run, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    /// Plays the true optimal slate every round.
    Oracle,
    /// UCB on relevance with the discount curve known.
    FaDcmP,
    /// UCB on relevance and discount, with forced exploration.
    FaDcm(FaDcmConfig),
    /// Explore-then-exploit benchmark.
    Ete(EteConfig),
}

impl PolicySpec {
    pub fn label(&self) -> &'static str {
        match self {
            PolicySpec::Oracle => "oracle",
            PolicySpec::FaDcmP => "fa-dcm-p",
            PolicySpec::FaDcm(_) => "fa-dcm",
            PolicySpec::Ete(_) => "ete",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PolicySpec::FaDcm(c) => c.validate(),
            PolicySpec::Ete(c) => c.validate(),
            _ => Ok(()),
        }
    }

    /// Instantiates the policy. Truth is consulted only for what the policy
    /// is entitled to know (the oracle sees everything, FA-DCM-P sees `f`).
    pub fn build(&self, truth: &ModelParams, max_len: Option<usize>) -> Result<Box<dyn Policy>> {
        self.validate()?;
        let catalog = truth.catalog.clone();
        Ok(match self {
            PolicySpec::Oracle => Box::new(OraclePolicy::new(truth, max_len)?),
            PolicySpec::FaDcmP => {
                Box::new(FaDcmPPolicy::new(catalog, truth.discount.clone(), max_len))
            }
            PolicySpec::FaDcm(c) => Box::new(FaDcmPolicy::new(catalog, c.clone(), max_len)),
            PolicySpec::Ete(c) => Box::new(EtePolicy::new(catalog, c.clone(), max_len)),
        })
    }
}

/// Forward clip restoring a non-increasing discount estimate:
/// `f[i] = min(f[i], f[i-1])` for `i = 1..`.
pub fn monotone_repair(mut f: Vec<f64>) -> Vec<f64> {
    for i in 1..f.len() {
        if f[i] > f[i - 1] {
            f[i] = f[i - 1];
        }
    }
    f
}

/// Counts and clicks per event `(discount_index, item)`. Indices at or beyond
/// the plateau are pooled into the plateau row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTable {
    n_items: usize,
    plateau: usize,
    counts: Vec<u64>,
    clicks: Vec<u64>,
    index_totals: Vec<u64>,
    /// Highest pooled discount index observed so far.
    max_index_seen: Option<usize>,
}

impl EventTable {
    pub fn new(n_items: usize, plateau: usize) -> Self {
        let rows = plateau + 1;
        Self {
            n_items,
            plateau,
            counts: vec![0; rows * n_items],
            clicks: vec![0; rows * n_items],
            index_totals: vec![0; rows],
            max_index_seen: None,
        }
    }

    pub fn plateau(&self) -> usize {
        self.plateau
    }

    pub fn record(&mut self, discount_index: usize, item: usize, click: bool) {
        let i = discount_index.min(self.plateau);
        let k = i * self.n_items + item;
        self.counts[k] += 1;
        self.clicks[k] += u64::from(click);
        self.index_totals[i] += 1;
        self.max_index_seen = Some(self.max_index_seen.map_or(i, |m| m.max(i)));
    }

    pub fn count(&self, i: usize, item: usize) -> u64 {
        self.counts[i * self.n_items + item]
    }

    pub fn clicks(&self, i: usize, item: usize) -> u64 {
        self.clicks[i * self.n_items + item]
    }

    /// Events observed at discount index `i`, over all items.
    pub fn index_total(&self, i: usize) -> u64 {
        self.index_totals[i]
    }

    pub fn max_index_seen(&self) -> Option<usize> {
        self.max_index_seen
    }

    /// Exposures of `item` over every discount index.
    pub fn item_total(&self, item: usize) -> u64 {
        (0..=self.plateau).map(|i| self.count(i, item)).sum()
    }

    pub fn total_events(&self) -> u64 {
        self.index_totals.iter().sum()
    }

    /// Empirical first-of-category click rate per item, `None` when unseen.
    pub fn first_of_category_means(&self) -> Vec<Option<f64>> {
        (0..self.n_items)
            .map(|j| {
                let n = self.count(0, j);
                (n > 0).then(|| self.clicks(0, j) as f64 / n as f64)
            })
            .collect()
    }
}

pub(crate) fn curve_from_estimate(values: Vec<f64>) -> Result<DiscountCurve> {
    DiscountCurve::new(values)
        .map_err(|e| Error::ModelDegenerate(format!("discount estimate rejected: {e}")))
}

/// Moves `item` to the front of `order`, keeping the rest in place.
pub(crate) fn move_to_front(order: &mut Vec<usize>, item: usize) {
    if let Some(pos) = order.iter().position(|&x| x == item) {
        order.remove(pos);
    }
    order.insert(0, item);
}
