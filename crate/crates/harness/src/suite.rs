//! Suite execution and report files.
//!
//! Seeds are independent scenarios and run on a worker pool; every check of
//! one seed runs on the same worker. Rows are sorted by registry position and
//! seed afterwards, so the report does not depend on scheduling. The only
//! field that differs between two runs of the same scenario is
//! `generated_unix`.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Scenario;
use crate::error::{HarnessError, Result};
use crate::registry::{self, Check, Models, SeedContext, Suite};

/// One check evaluated on one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub check_id: String,
    /// Quotation of the statement under test.
    pub paper_ref: String,
    pub suite: Suite,
    pub seed: u64,
    pub inputs: String,
    /// SHA-256 of the check id, the model and the seeded operands.
    pub digest: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check_id: String,
    pub rows: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    /// Failed rows whose check returned an error instead of a value.
    pub errors: usize,
    pub checks: Vec<CheckSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub parallel: bool,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub generated_unix: u64,
    pub environment: Environment,
    pub scenario: Scenario,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    /// Write `<suite>.json` and `<suite>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.suite));
        std::fs::write(&json, serde_json::to_string_pretty(self)? + "\n")?;
        let csv_path = dir.join(format!("{}.csv", self.suite));
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(["check_id", "suite", "seed", "value", "tol", "pass", "digest", "inputs", "paper_ref", "error"])?;
        for r in &self.rows {
            w.write_record([
                r.check_id.as_str(),
                r.suite.name(),
                &r.seed.to_string(),
                &format!("{:e}", r.value),
                &format!("{:e}", r.tol),
                if r.pass { "true" } else { "false" },
                &r.digest,
                &r.inputs,
                &r.paper_ref,
                r.error.as_deref().unwrap_or(""),
            ])?;
        }
        w.flush()?;
        Ok((json, csv_path))
    }
}

fn digest(check: &Check, ctx: &SeedContext) -> String {
    let mut h = Sha256::new();
    h.update(check.id.as_bytes());
    h.update(ctx.seed.to_le_bytes());
    for f in [&ctx.u, &ctx.v, &ctx.w] {
        for x in f.values() {
            h.update(x.to_le_bytes());
        }
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn failure_row(check: &Check, seed: u64, tol: f64, message: String) -> Row {
    Row {
        check_id: check.id.into(),
        paper_ref: check.statement.into(),
        suite: check.suite,
        seed,
        inputs: format!("seed {seed}; {}", check.inputs),
        digest: String::new(),
        value: f64::NAN,
        tol,
        pass: false,
        error: Some(message),
    }
}

fn run_seed(scenario: &Scenario, models: &Models, checks: &[&'static Check], seed: u64) -> Vec<Row> {
    let ctx = match SeedContext::new(scenario, models, seed) {
        Ok(c) => c,
        Err(e) => {
            return checks.iter().map(|c| failure_row(c, seed, scenario.tolerance(c.id, c.tol), e.to_string())).collect();
        }
    };
    checks
        .iter()
        .map(|c| {
            let tol = scenario.tolerance(c.id, c.tol);
            match (c.run)(&ctx) {
                Ok(value) => Row {
                    check_id: c.id.into(),
                    paper_ref: c.statement.into(),
                    suite: c.suite,
                    seed,
                    inputs: format!("seed {seed}; {}", c.inputs),
                    digest: digest(c, &ctx),
                    value,
                    tol,
                    pass: value <= tol,
                    error: None,
                },
                Err(e) => failure_row(c, seed, tol, e.to_string()),
            }
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn map_seeds<F>(workers: usize, seeds: Vec<u64>, f: F) -> Result<Vec<Vec<Row>>>
where
    F: Fn(u64) -> Vec<Row> + Sync,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| seeds.into_par_iter().map(&f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn map_seeds<F>(_workers: usize, seeds: Vec<u64>, f: F) -> Result<Vec<Vec<Row>>>
where
    F: Fn(u64) -> Vec<Row> + Sync,
{
    Ok(seeds.into_iter().map(f).collect())
}

/// Run a named battery over the configured seeds.
///
/// Check failures, including errors raised by the library, become failed
/// rows; only an unknown suite or an invalid scenario is an error.
pub fn run_suite(name: &str, scenario: &Scenario) -> Result<SuiteReport> {
    let Some(selection) = Suite::parse(name) else {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        return Err(HarnessError::Config(format!("unknown suite {name:?}; expected one of {} or all", names.join(", "))));
    };
    scenario.validate()?;
    let checks = registry::select(selection);
    let needs = |s: Suite| checks.iter().any(|c| c.suite == s);
    let models = Models::build(scenario, needs(Suite::Canonical), needs(Suite::Typei))?;
    let seeds: Vec<u64> = scenario.seeds().collect();
    let per_seed = map_seeds(scenario.workers, seeds, |seed| run_seed(scenario, &models, &checks, seed))?;
    let order = |id: &str| checks.iter().position(|c| c.id == id).unwrap_or(usize::MAX);
    let mut rows: Vec<Row> = per_seed.into_iter().flatten().collect();
    rows.sort_by_key(|r| (order(&r.check_id), r.seed));
    let summary = summarize(&checks, &rows);
    Ok(SuiteReport {
        suite: name.to_string(),
        generated_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            parallel: cfg!(feature = "parallel"),
            workers: scenario.workers,
        },
        scenario: scenario.clone(),
        rows,
        summary,
    })
}

fn summarize(checks: &[&'static Check], rows: &[Row]) -> Summary {
    let passed = rows.iter().filter(|r| r.pass).count();
    Summary {
        rows: rows.len(),
        passed,
        failed: rows.len() - passed,
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        checks: checks
            .iter()
            .map(|c| {
                let mine = rows.iter().filter(|r| r.check_id == c.id);
                CheckSummary {
                    check_id: c.id.into(),
                    rows: mine.clone().count(),
                    passed: mine.filter(|r| r.pass).count(),
                }
            })
            .collect(),
    }
}
