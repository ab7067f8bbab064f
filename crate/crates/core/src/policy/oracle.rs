use rand::RngCore;
use serde::Serialize;

use super::Policy;
use crate::error::Result;
use crate::model::{ModelParams, Slate};
use crate::optimizer::optimal_slate;
use crate::simulator::InteractionRecord;

/// Clairvoyant baseline: always plays the optimal slate under the truth.
#[derive(Debug, Clone, Serialize)]
pub struct OraclePolicy {
    slate: Slate,
}

impl OraclePolicy {
    pub fn new(truth: &ModelParams, max_len: Option<usize>) -> Result<Self> {
        Ok(Self {
            slate: oracle_select(truth, max_len)?,
        })
    }
}

/// The optimal slate for the true parameters.
pub fn oracle_select(truth: &ModelParams, max_len: Option<usize>) -> Result<Slate> {
    optimal_slate(
        &truth.catalog,
        truth.relevance.as_slice(),
        &truth.discount,
        max_len,
    )
}

impl Policy for OraclePolicy {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn select_slate(&mut self, _t: u64, _rng: &mut dyn RngCore) -> Result<Slate> {
        Ok(self.slate.clone())
    }

    fn observe(&mut self, _record: &InteractionRecord) -> Result<()> {
        Ok(())
    }

    fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
