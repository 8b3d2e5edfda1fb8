//! Command-line front end of `pressure-lab`: `verify`, `solve` and `study`
//! driven by one TOML configuration file.

pub mod config;
pub mod error;
pub mod field;
pub mod report;
pub mod solve;
pub mod study;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{EtaSweep, ExperimentConfig, FieldSpec, StudyConfig, StudyField};
pub use error::{CliError, CliResult};
pub use solve::{cmd_solve, SolveReport};
pub use study::{cmd_study, ledger_csv, run_study, StudyOutcome};
pub use verify::{cmd_verify, run_verify, VerifyReport};

#[derive(Debug, Parser)]
#[command(name = "pressure-lab", version, about = "Pressure recovery experiments for weak planar Euler flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration; defaults apply when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Dotted override such as `grid.resolutions=[[128,256]]`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker count for `study` (overrides `output.jobs`).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the invariant suites of every module.
    Verify,
    /// Solve for the pressure of `[field]` and dump p, P and the trace curve.
    Solve,
    /// Run the η sweep of `[study]` and write the estimate ledger.
    Study,
}

impl Cli {
    pub fn load_config(&self) -> CliResult<ExperimentConfig> {
        let text = match &self.config {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Validation(format!("--config {}: {e}", p.display())))?,
            None => String::new(),
        };
        let mut cfg = ExperimentConfig::load(&text, &self.set)?;
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        if let Some(j) = self.jobs {
            cfg.output.jobs = Some(j);
        }
        Ok(cfg)
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = cli.load_config().and_then(|cfg| match cli.command {
        Command::Verify => cmd_verify(&cfg).map(|r| {
            format!("verify: {} checks passed, report in {}", r.checks.len(), cfg.output.dir.display())
        }),
        Command::Solve => cmd_solve(&cfg).map(|r| {
            let oracle = r.oracle_error.map(|e| format!(", oracle error {e:e}")).unwrap_or_default();
            format!("solve: {} iterations{oracle}, outputs in {}", r.solver.iterations, cfg.output.dir.display())
        }),
        Command::Study => cmd_study(&cfg).map(|o| {
            format!("study: {} records over {} fields, ledger in {}", o.ledger.records().len(), o.fields.len(), cfg.output.dir.display())
        }),
    });
    match outcome {
        Ok(line) => {
            println!("{line}");
            0
        }
        Err(e) => {
            eprintln!("pressure-lab: {e}");
            e.exit_code()
        }
    }
}
