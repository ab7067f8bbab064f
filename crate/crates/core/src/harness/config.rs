//! Experiment configuration, as read from TOML or JSON files.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{BehaviorParams, Catalog, DiscountCurve, ModelParams, Relevance};
use crate::policy::PolicySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogSpec {
    pub categories: usize,
    pub items_per_category: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelevanceSpec {
    Fixed { values: Vec<f64> },
    /// Drawn independently per item and per replication.
    Uniform { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscountSpec {
    /// `f(h) = exp(-rate * h)`, stored up to `plateau` (default: item count).
    Exponential {
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        plateau: Option<usize>,
    },
    Table { values: Vec<f64> },
}

fn default_case_label() -> String {
    "case".to_string()
}

fn default_checkpoint_every() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_case_label")]
    pub case_label: String,
    pub catalog: CatalogSpec,
    pub relevance: RelevanceSpec,
    pub discount: DiscountSpec,
    pub behavior: BehaviorParams,
    pub horizon: u64,
    pub replications: usize,
    pub policy: PolicySpec,
    pub master_seed: u64,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: u64,
    /// Maximum slate length; full catalog when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let catalog = self.build_catalog()?;
        let n = catalog.n_items();
        self.behavior.validate()?;
        if self.horizon < 1 {
            return Err(Error::param("horizon", "must be >= 1"));
        }
        if self.replications < 1 {
            return Err(Error::param("replications", "must be >= 1"));
        }
        if self.checkpoint_every < 1 {
            return Err(Error::param("checkpoint_every", "must be >= 1"));
        }
        if let Some(l) = self.max_len {
            if l == 0 || l > n {
                return Err(Error::param(
                    "max_len",
                    format!("{l} must lie in 1..={n} (the catalog size)"),
                ));
            }
        }
        match &self.relevance {
            RelevanceSpec::Fixed { values } => {
                if values.len() != n {
                    return Err(Error::param(
                        "relevance.values",
                        format!("has {} entries, catalog has {n} items", values.len()),
                    ));
                }
                Relevance::new(values.clone())?;
            }
            RelevanceSpec::Uniform { low, high } => {
                if !(0.0 <= *low && low <= high && *high <= 1.0) {
                    return Err(Error::param(
                        "relevance",
                        format!("draw range [{low}, {high}] must satisfy 0 <= low <= high <= 1"),
                    ));
                }
            }
        }
        self.build_discount(n)?;
        self.policy.validate()
    }

    pub fn build_catalog(&self) -> Result<Catalog> {
        Catalog::uniform(self.catalog.categories, self.catalog.items_per_category)
    }

    pub fn build_discount(&self, n_items: usize) -> Result<DiscountCurve> {
        match &self.discount {
            DiscountSpec::Exponential { rate, plateau } => {
                DiscountCurve::exponential(*rate, plateau.unwrap_or(n_items))
            }
            DiscountSpec::Table { values } => DiscountCurve::new(values.clone()),
        }
    }

    /// Ground truth for one replication; uniform relevance is drawn from `rng`.
    pub fn draw_truth<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ModelParams> {
        let catalog = self.build_catalog()?;
        let n = catalog.n_items();
        let u = match &self.relevance {
            RelevanceSpec::Fixed { values } => values.clone(),
            RelevanceSpec::Uniform { low, high } => {
                (0..n).map(|_| low + (high - low) * rng.gen::<f64>()).collect()
            }
        };
        let discount = self.build_discount(n)?;
        ModelParams::new(catalog, Relevance::new(u)?, discount, self.behavior)
    }

    /// Short content hash of the resolved configuration.
    pub fn config_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// A named group of cases sharing one output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSuite {
    pub name: String,
    pub cases: Vec<ExperimentConfig>,
}

impl ExperimentSuite {
    pub fn validate(&self) -> Result<()> {
        if self.cases.is_empty() {
            return Err(Error::param("cases", "suite has no cases"));
        }
        for (k, case) in self.cases.iter().enumerate() {
            case.validate().map_err(|e| match e {
                Error::InvalidParameter { field, reason } => Error::InvalidParameter {
                    field: format!("cases[{k}] ({}).{field}", case.case_label),
                    reason,
                },
                other => other,
            })?;
        }
        Ok(())
    }

    /// Applies the same override to every case.
    pub fn for_each_case(&mut self, mut f: impl FnMut(&mut ExperimentConfig)) {
        self.cases.iter_mut().for_each(&mut f);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Toml,
    Json,
}

fn format_of(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Toml,
    }
}

/// Parses either a suite (`name` + `cases`) or a single experiment config.
/// A lone config becomes a one-case suite named `default_name`.
pub fn parse_suite(text: &str, json: bool, default_name: &str) -> Result<ExperimentSuite> {
    let has_cases = if json {
        serde_json::from_str::<serde_json::Value>(text)
            .map_err(|e| Error::Parse(e.to_string()))?
            .get("cases")
            .is_some()
    } else {
        text.parse::<toml::Table>()
            .map_err(|e| Error::Parse(e.to_string()))?
            .contains_key("cases")
    };
    let suite = match (json, has_cases) {
        (true, true) => serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?,
        (false, true) => toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?,
        (true, false) => single(
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?,
            default_name,
        ),
        (false, false) => single(
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?,
            default_name,
        ),
    };
    Ok(suite)
}

fn single(config: ExperimentConfig, name: &str) -> ExperimentSuite {
    ExperimentSuite {
        name: name.to_string(),
        cases: vec![config],
    }
}

pub fn load_suite(path: &Path) -> Result<ExperimentSuite> {
    let text = std::fs::read_to_string(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("experiment");
    let suite = parse_suite(&text, format_of(path) == Format::Json, stem)
        .map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })?;
    suite.validate()?;
    Ok(suite)
}
