//! `fadcm`: run fatigue-aware DCM bandit experiments from the command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fadcm_core::harness::output::{write_case, write_resolved_suite};
use fadcm_core::harness::{
    load_suite, preset, run_experiment, run_oracle_check, run_replication_with, ExperimentSuite,
};
use fadcm_core::Error;

#[derive(Parser)]
#[command(name = "fadcm", version, about = "Fatigue-aware DCM bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment(s) described by a TOML or JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run one of the built-in experiments (I, II, III, IV).
    Preset {
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the optimal-slate ordering against exhaustive search.
    OracleCheck {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Negative control: ignore the discount in the fast path.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Time a preset at reduced scale.
    Bench {
        #[arg(long, default_value = "I")]
        preset: String,
        #[arg(long, default_value_t = 2000)]
        horizon: u64,
        #[arg(long, default_value_t = 4)]
        replications: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the master seed of every case.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    checkpoint_every: Option<u64>,
    /// Cap on worker threads for replications.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write every session of replication 0 as NDJSON.
    #[arg(long)]
    dump_sessions: bool,
    /// Write the final policy state of replication 0 as JSON.
    #[arg(long)]
    dump_state: bool,
}

impl RunArgs {
    fn apply(&self, suite: &mut ExperimentSuite) {
        suite.for_each_case(|c| {
            if let Some(s) = self.seed {
                c.master_seed = s;
            }
            if let Some(h) = self.horizon {
                c.horizon = h;
            }
            if let Some(r) = self.replications {
                c.replications = r;
            }
            if let Some(k) = self.checkpoint_every {
                c.checkpoint_every = k;
            }
        });
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn execute(mut suite: ExperimentSuite, args: &RunArgs) -> Result<(), Failure> {
    args.apply(&mut suite);
    suite.validate()?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Config(format!("output dir {}: {e}", args.out.display())))?;
    write_resolved_suite(&args.out, &suite)?;

    for config in &suite.cases {
        eprintln!(
            "[{}] {} ({}): {} replications x {} rounds",
            suite.name,
            config.case_label,
            config.policy.label(),
            config.replications,
            config.horizon
        );
        let started = Instant::now();
        let stats = run_experiment(config, args.jobs)?;
        let files = write_case(&args.out, &suite, config, &stats)?;
        eprintln!(
            "[{}] {} done in {:.1}s, mean final regret {:.2}",
            suite.name,
            config.case_label,
            started.elapsed().as_secs_f64(),
            stats.mean_final
        );
        if args.dump_sessions || args.dump_state {
            dump_replication_zero(&args.out, &suite.name, config, args)?;
        }
        println!(
            "{}",
            serde_json::json!({
                "suite": suite.name,
                "case_label": stats.case_label,
                "policy": stats.policy,
                "mean_final_regret": stats.mean_final,
                "csv": files.csv,
                "sidecar": files.json,
            })
        );
    }
    Ok(())
}

fn dump_replication_zero(
    out: &Path,
    suite: &str,
    config: &fadcm_core::harness::ExperimentConfig,
    args: &RunArgs,
) -> Result<(), Failure> {
    let stem = format!("{suite}_{}", config.case_label);
    let mut sessions = if args.dump_sessions {
        Some(BufWriter::new(File::create(out.join(format!("{stem}_sessions.ndjson")))?))
    } else {
        None
    };
    let mut write_err = None;
    let (_, policy) = run_replication_with(config, 0, |t, record| {
        if let Some(w) = sessions.as_mut() {
            let line = serde_json::json!({ "t": t, "record": record });
            if let Err(e) = writeln!(w, "{line}") {
                write_err.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    if let Some(mut w) = sessions {
        w.flush()?;
    }
    if args.dump_state {
        let f = File::create(out.join(format!("{stem}_state.json")))?;
        serde_json::to_writer_pretty(BufWriter::new(f), &policy.snapshot())
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, run } => execute(load_suite(&config)?, &run),
        Command::Preset { name, run } => execute(preset(&name)?, &run),
        Command::OracleCheck {
            instances,
            max_n,
            seed,
            inject_fault,
        } => {
            let report = run_oracle_check(instances, max_n, seed, inject_fault)?;
            println!(
                "{}",
                serde_json::to_string(&report).map_err(|e| Failure::Runtime(e.to_string()))?
            );
            eprintln!(
                "oracle check: {} passed, {} failed (max |diff| = {:.3e})",
                report.passed, report.failed, report.max_abs_diff
            );
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Runtime(format!(
                    "{} of {} instances disagree with exhaustive search",
                    report.failed, report.instances
                )))
            }
        }
        Command::Bench {
            preset: name,
            horizon,
            replications,
            jobs,
        } => {
            let mut suite = preset(&name)?;
            suite.for_each_case(|c| {
                c.horizon = horizon;
                c.replications = replications;
            });
            for config in &suite.cases {
                let started = Instant::now();
                let stats = run_experiment(config, jobs)?;
                let secs = started.elapsed().as_secs_f64();
                println!(
                    "{}",
                    serde_json::json!({
                        "suite": suite.name,
                        "case_label": config.case_label,
                        "policy": stats.policy,
                        "seconds": secs,
                        "rounds_per_second": (horizon as f64 * replications as f64) / secs,
                        "mean_final_regret": stats.mean_final,
                    })
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
