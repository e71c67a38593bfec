//! Driver for the verification suites: loads a run configuration, runs the
//! selected suites (one thread each), and assembles a JSON report.
//!
//! Workspace layout: `{workspace}/{algebroid-hash}/{artifact}` with artifacts
//! `presentation.txt`, one `{suite}-{key}.json` per suite result and
//! `report-{key}.json`. A suite result found under its key is reused as is,
//! so cache hits give the same bytes as fresh runs.

pub mod config;
pub mod report;
mod suites;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rees::ReesAlgebra;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{AlgebroidSource, IdealTarget, RunConfig, Strategy, Suite, Targets, Window};
pub use report::{Check, Record, Report, Status, SuiteReport, SCHEMA_VERSION};

use suites::{run_suite, Context};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("workspace {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    fn io(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
        move |source| RunError::Io { path: path.to_path_buf(), source }
    }
}

pub fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

#[derive(Serialize)]
struct SuiteKey<'a> {
    schema_version: u32,
    suite: Suite,
    window: &'a Window,
    strategy: Strategy,
    seed: u64,
    targets: &'a Targets,
}

fn suite_key(config: &RunConfig, suite: Suite) -> String {
    let key = SuiteKey {
        schema_version: SCHEMA_VERSION,
        suite,
        window: &config.window,
        strategy: config.strategy,
        seed: config.seed,
        targets: &config.targets,
    };
    sha256_hex(&serde_json::to_string(&key).expect("key serializes"))[..16].to_string()
}

struct Prepared {
    ctx: Context,
    hash: String,
    canonical: String,
}

fn prepare(config: RunConfig) -> Result<Prepared, RunError> {
    let config = config.normalized()?;
    let pres = config.algebroid.presentation()?;
    if !pres.base.is_field() {
        for s in &config.suites {
            if let Some(why) = s.point_base_restriction() {
                return Err(RunError::Usage(format!("suite {} is not available over {}: {why}", s.name(), pres.base.variables().join(", "))));
            }
        }
    }
    if config.suites.contains(&Suite::Ideals) && config.targets.ideals.is_empty() {
        return Err(RunError::Usage("suite ideals needs at least one targets.ideals entry".into()));
    }
    let canonical = pres.canonical_string();
    let hash = sha256_hex(&canonical);
    let alg = Arc::new(ReesAlgebra::new(pres.clone()));
    Ok(Prepared { ctx: Context { pres, alg, config }, hash, canonical })
}

fn assemble(p: &Prepared, suites: Vec<SuiteReport>) -> Report {
    let failed = suites.iter().filter(|s| s.status == Status::Fail).map(|s| s.suite).collect();
    let inconclusive = suites.iter().filter(|s| s.status == Status::Inconclusive).map(|s| s.suite).collect();
    let status = suites.iter().map(|s| s.status).max().unwrap_or(Status::Pass);
    Report {
        schema_version: SCHEMA_VERSION,
        algebroid_hash: p.hash.clone(),
        algebroid: p.canonical.clone(),
        config: p.ctx.config.clone(),
        status,
        failed,
        inconclusive,
        suites,
    }
}

fn compute(ctx: &Context, todo: &[Suite]) -> Vec<SuiteReport> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = todo.iter().map(|&s| scope.spawn(move || run_suite(ctx, s))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    })
}

/// Runs the suites without touching the disk.
pub fn run(config: RunConfig) -> Result<Report, RunError> {
    let p = prepare(config)?;
    let results = compute(&p.ctx, &p.ctx.config.suites);
    Ok(assemble(&p, results))
}

/// Runs the suites, reusing and writing cached suite results and the
/// report under `workspace`.
pub fn run_in_workspace(config: RunConfig, workspace: &Path) -> Result<Report, RunError> {
    let p = prepare(config)?;
    let dir = workspace.join(&p.hash);
    fs::create_dir_all(&dir).map_err(RunError::io(&dir))?;
    let pres_path = dir.join("presentation.txt");
    fs::write(&pres_path, format!("{}\n", p.canonical)).map_err(RunError::io(&pres_path))?;
    let suites = &p.ctx.config.suites;
    let paths: Vec<PathBuf> =
        suites.iter().map(|&s| dir.join(format!("{}-{}.json", s.name(), suite_key(&p.ctx.config, s)))).collect();
    let cached: Vec<Option<SuiteReport>> = paths
        .iter()
        .zip(suites)
        .map(|(path, s)| {
            let r: SuiteReport = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
            (r.suite == *s).then_some(r)
        })
        .collect();
    let todo: Vec<Suite> = suites.iter().zip(&cached).filter(|(_, c)| c.is_none()).map(|(s, _)| *s).collect();
    let mut fresh = compute(&p.ctx, &todo).into_iter();
    let mut results = Vec::with_capacity(suites.len());
    for (path, c) in paths.iter().zip(cached) {
        let r = match c {
            Some(r) => r,
            None => {
                let r = fresh.next().expect("one result per computed suite");
                let json = serde_json::to_string_pretty(&r).expect("suite report serializes");
                fs::write(path, json).map_err(RunError::io(path))?;
                r
            }
        };
        results.push(r);
    }
    let report = assemble(&p, results);
    let json = report.to_json();
    let report_path = dir.join(format!("report-{}.json", &sha256_hex(&serde_json::to_string(&report.config).expect("config serializes"))[..16]));
    fs::write(&report_path, &json).map_err(RunError::io(&report_path))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_base_rejects_point_only_suites() {
        let cfg = RunConfig::builtin("weyl(1)", &[Suite::Tau]);
        match run(cfg) {
            Err(RunError::Usage(m)) => assert!(m.contains("point base"), "{m}"),
            other => panic!("expected a usage error, got {other:?}"),
        }
    }

    #[test]
    fn ideals_suite_needs_targets() {
        let cfg = RunConfig::builtin("abelian(1)", &[Suite::Ideals]);
        assert!(matches!(run(cfg), Err(RunError::Usage(_))));
    }

    #[test]
    fn keys_depend_on_seed() {
        let a = RunConfig::builtin("sl2", &[Suite::Pbw]);
        let mut b = a.clone();
        b.seed = 1;
        assert_ne!(suite_key(&a, Suite::Pbw), suite_key(&b, Suite::Pbw));
        assert_eq!(suite_key(&a, Suite::Pbw), suite_key(&a.clone(), Suite::Pbw));
    }
}
