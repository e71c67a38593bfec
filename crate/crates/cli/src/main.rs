use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context as _;
use clap::Parser;
use cli::{run_in_workspace, RunConfig, RunError, Status, Strategy, Suite};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Run verification suites on a Lie algebroid and print a JSON report.
///
/// Exit status: 0 when no suite failed (inconclusive suites are listed in the
/// report and on stderr), 1 when a suite failed, 2 on usage errors, 3 when
/// the workspace cannot be written.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Suite to run; repeat to select several. Replaces the configured list.
    #[arg(long = "suite", value_enum)]
    suites: Vec<Suite>,
    /// Top internal degree D.
    #[arg(long)]
    window: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cache and report directory.
    #[arg(long, env = "ALGEBROID_WORKSPACE")]
    workspace: Option<PathBuf>,
    #[arg(long, value_enum)]
    strategy: Option<Strategy>,
}

fn load(args: &Args) -> anyhow::Result<RunConfig> {
    let src = std::fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg = RunConfig::parse(&src)?;
    if !args.suites.is_empty() {
        cfg.suites = args.suites.clone();
    }
    if let Some(d) = args.window {
        cfg.window.degree = d;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(s) = args.strategy {
        cfg.strategy = s;
    }
    if let Some(w) = &args.workspace {
        cfg.workspace = Some(w.clone());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let workspace = cfg.workspace.clone().unwrap_or_else(|| PathBuf::from("workspace"));
    let start = Instant::now();
    let report = match run_in_workspace(cfg, &workspace) {
        Ok(r) => r,
        Err(e @ RunError::Usage(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e @ RunError::Io { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO);
        }
    };
    print!("{}", report.to_json());
    for s in &report.suites {
        let status = match s.status {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "FAIL",
        };
        eprintln!("{:<11} {status}{}", s.suite.name(), s.reason.as_ref().map(|r| format!(" ({r})")).unwrap_or_default());
    }
    if !report.inconclusive.is_empty() {
        let names: Vec<&str> = report.inconclusive.iter().map(|s| s.name()).collect();
        eprintln!("inconclusive: {}", names.join(", "));
    }
    eprintln!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    if report.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
