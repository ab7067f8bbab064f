//! Experiment harness: configs, presets, the simulation loop, regret
//! aggregation and result files.

pub mod config;
pub mod oracle_check;
pub mod output;
pub mod presets;
pub mod run;
pub mod summary;

pub use config::{
    load_suite, parse_suite, CatalogSpec, DiscountSpec, ExperimentConfig, ExperimentSuite,
    RelevanceSpec,
};
pub use oracle_check::{run_oracle_check, OracleCheckReport};
pub use presets::{preset, PRESET_NAMES};
pub use run::{
    instantaneous_regret, replication_rng, run_experiment, run_replication, run_replication_with,
    run_replications, RegretSeries, ReplicationOutcome,
};
pub use summary::{summarize, SummaryStats};
