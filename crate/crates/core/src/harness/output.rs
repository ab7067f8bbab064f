//! Result files: regret CSV, per-case JSON sidecar, resolved-config echo.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentSuite};
use super::summary::SummaryStats;
use crate::error::Result;

pub const CSV_COLUMNS: [&str; 6] = [
    "checkpoint_t",
    "mean_cum_regret",
    "lo95",
    "hi95",
    "policy",
    "case_label",
];

/// Writes the regret CSV. The first line is a `#` comment carrying the
/// config hash and master seed.
pub fn write_csv<W: Write>(out: W, config: &ExperimentConfig, stats: &SummaryStats) -> Result<()> {
    let mut out = out;
    writeln!(
        out,
        "# config_hash={} master_seed={}",
        config.config_hash(),
        config.master_seed
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for k in 0..stats.checkpoints.len() {
        w.write_record([
            stats.checkpoints[k].to_string(),
            stats.mean_cum_regret[k].to_string(),
            stats.lo95[k].to_string(),
            stats.hi95[k].to_string(),
            stats.policy.clone(),
            stats.case_label.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a> {
    pub config_hash: String,
    pub master_seed: u64,
    pub case_label: &'a str,
    pub policy: &'a str,
    pub horizon: u64,
    pub replications: usize,
    pub mean_final: f64,
    pub finals: &'a [f64],
    pub mean_realized_clicks: f64,
    pub config: &'a ExperimentConfig,
}

pub fn sidecar<'a>(config: &'a ExperimentConfig, stats: &'a SummaryStats) -> Sidecar<'a> {
    Sidecar {
        config_hash: config.config_hash(),
        master_seed: config.master_seed,
        case_label: &stats.case_label,
        policy: &stats.policy,
        horizon: config.horizon,
        replications: config.replications,
        mean_final: stats.mean_final,
        finals: &stats.finals,
        mean_realized_clicks: stats.mean_realized_clicks,
        config,
    }
}

fn file_stem(suite: &ExperimentSuite, config: &ExperimentConfig) -> String {
    format!("{}_{}", suite.name, config.case_label)
}

/// Paths written for one case.
#[derive(Debug, Clone)]
pub struct CaseFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn write_case(
    dir: &Path,
    suite: &ExperimentSuite,
    config: &ExperimentConfig,
    stats: &SummaryStats,
) -> Result<CaseFiles> {
    fs::create_dir_all(dir)?;
    let stem = file_stem(suite, config);
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    write_csv(BufWriter::new(File::create(&csv)?), config, stats)?;
    let mut f = BufWriter::new(File::create(&json)?);
    serde_json::to_writer_pretty(&mut f, &sidecar(config, stats))?;
    writeln!(f)?;
    f.flush()?;
    Ok(CaseFiles { csv, json })
}

/// Writes the resolved suite (after overrides) as loadable JSON.
pub fn write_resolved_suite(dir: &Path, suite: &ExperimentSuite) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}_resolved.json", suite.name));
    let mut f = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut f, suite)?;
    writeln!(f)?;
    f.flush()?;
    Ok(path)
}
