//! `orthoglide`: run or validate shaking-force planning scenarios.
//!
//! Exit status: 0 on success, 1 for an unreadable or invalid config (or bad
//! command-line usage), 2 when planning or writing outputs fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orthoglide_balance::par::Execution;
use orthoglide_balance::scenario::{self, RunOptions, ScenarioConfig, ScenarioError};
use orthoglide_balance::PlanMode;

#[derive(Debug, Parser)]
#[command(
    name = "orthoglide",
    version,
    about = "Orthoglide shaking-force balancing by COM trajectory planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan, evaluate and write CSV time series plus a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `modes` from the config.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Plan the modes one after the other on the main thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Check a config and list every violated constraint.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Platform,
    Com,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<PlanMode> {
        match self {
            ModeArg::Platform => vec![PlanMode::PlatformLineQuintic],
            ModeArg::Com => vec![PlanMode::ComLineBangbang],
            ModeArg::Both => PlanMode::ALL.to_vec(),
        }
    }
}

fn fail(err: ScenarioError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match cli.command {
        Command::Validate { config } => {
            let cfg = match ScenarioConfig::load(&config) {
                Ok(cfg) => cfg,
                Err(e) => return fail(e),
            };
            match scenario::validate_config(&cfg) {
                Ok(_) => {
                    println!("{}: ok", config.display());
                    ExitCode::SUCCESS
                }
                Err(violations) => fail(ScenarioError::Invalid(violations)),
            }
        }
        Command::Run {
            config,
            out,
            mode,
            sequential,
        } => {
            let cfg = match ScenarioConfig::load(&config) {
                Ok(cfg) => cfg,
                Err(e) => return fail(e),
            };
            let opts = RunOptions {
                output_dir: out,
                modes: mode.map(ModeArg::modes),
                execution: if sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
            };
            match scenario::run_scenario(&cfg, &opts) {
                Ok(report) => {
                    print!("{}", scenario::render_text(&report.summary));
                    println!("\nwrote {}", report.output_dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
