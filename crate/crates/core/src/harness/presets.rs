//! The four reference experiments.
//!
//! | preset | catalog | cases |
//! |--------|---------|-------|
//! | I   | 3 x 10 | FA-DCM-P, q = 0.7, g in {0.95, 0.85, 0.75}, rate 0.1 |
//! | II  | 3 x 10 | FA-DCM, q = 0.7, (g, rate) in {(0.85, 0.1), (0.85, 0.15), (0.75, 0.1)} |
//! | III | 3 x 10 | FA-DCM vs ETE, g = 0.75, q = 0.7, rate 0.1 |
//! | IV  | 5 x 20 | FA-DCM vs ETE, g = 0.843, q = 0.823, rate 0.1 |
//!
//! Relevance is drawn from U[0, 0.5] per replication. IV substitutes such
//! draws for relevances fitted on a proprietary click log.

use super::config::{CatalogSpec, DiscountSpec, ExperimentConfig, ExperimentSuite, RelevanceSpec};
use crate::error::{Error, Result};
use crate::model::BehaviorParams;
use crate::policy::{EteConfig, FaDcmConfig, PolicySpec};

pub const PRESET_NAMES: [&str; 4] = ["I", "II", "III", "IV"];
pub const DEFAULT_MASTER_SEED: u64 = 20_200_207;
pub const DEFAULT_HORIZON: u64 = 10_000;
pub const DEFAULT_REPLICATIONS: usize = 20;

fn case(
    label: &str,
    categories: usize,
    per_category: usize,
    g: f64,
    q: f64,
    rate: f64,
    policy: PolicySpec,
) -> ExperimentConfig {
    ExperimentConfig {
        case_label: label.to_string(),
        catalog: CatalogSpec {
            categories,
            items_per_category: per_category,
        },
        relevance: RelevanceSpec::Uniform { low: 0.0, high: 0.5 },
        discount: DiscountSpec::Exponential {
            rate,
            plateau: None,
        },
        behavior: BehaviorParams { g, q },
        horizon: DEFAULT_HORIZON,
        replications: DEFAULT_REPLICATIONS,
        policy,
        master_seed: DEFAULT_MASTER_SEED,
        checkpoint_every: 100,
        max_len: None,
    }
}

/// Looks up a preset by name (`I`..`IV`, case-insensitive; `expI` style
/// prefixes accepted).
pub fn preset(name: &str) -> Result<ExperimentSuite> {
    let key = name.trim();
    let key = key
        .strip_prefix("exp")
        .or_else(|| key.strip_prefix("Exp"))
        .unwrap_or(key)
        .to_ascii_uppercase();
    let fadcm = || PolicySpec::FaDcm(FaDcmConfig::default());
    let ete = || PolicySpec::Ete(EteConfig::default());
    let cases = match key.as_str() {
        "I" => vec![
            case("case1", 3, 10, 0.95, 0.7, 0.1, PolicySpec::FaDcmP),
            case("case2", 3, 10, 0.85, 0.7, 0.1, PolicySpec::FaDcmP),
            case("case3", 3, 10, 0.75, 0.7, 0.1, PolicySpec::FaDcmP),
        ],
        "II" => vec![
            case("case4", 3, 10, 0.85, 0.7, 0.1, fadcm()),
            case("case5", 3, 10, 0.85, 0.7, 0.15, fadcm()),
            case("case6", 3, 10, 0.75, 0.7, 0.1, fadcm()),
        ],
        "III" => vec![
            case("fadcm", 3, 10, 0.75, 0.7, 0.1, fadcm()),
            case("ete", 3, 10, 0.75, 0.7, 0.1, ete()),
        ],
        "IV" => vec![
            case("fadcm", 5, 20, 0.843, 0.823, 0.1, fadcm()),
            case("ete", 5, 20, 0.843, 0.823, 0.1, ete()),
        ],
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    Ok(ExperimentSuite {
        name: format!("exp{key}"),
        cases,
    })
}
