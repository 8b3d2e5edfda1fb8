//! `study`: the η × seed × α × resolution sweep behind the estimate ledger.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use pressure_lab::norms::ResolvedPairs;
use pressure_lab::pressure::{eta_study, median, sweep_spread, EstimateLedger, EstimateRecord, FieldTag};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, StudyField};
use crate::error::{CliError, CliResult};
use crate::field::{rough_field, smooth_field};
use crate::report::{num, opt, write_json, write_text, Envelope};

#[derive(Clone, Debug)]
struct Job {
    level: usize,
    alpha: f64,
    seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunFailure {
    pub field: String,
    pub error: String,
}

/// Per-field checks of one sweep.
#[derive(Clone, Debug, Serialize)]
pub struct FieldSummary {
    pub field: String,
    pub alpha: f64,
    pub grid: [usize; 2],
    pub runs: usize,
    pub c_meas_finite: bool,
    /// `max/min` of `C_meas` over the η sweep.
    pub c_meas_spread: Option<f64>,
    /// `max C₁_meas / median C₁_meas`.
    pub c1_over_median: Option<f64>,
    pub passed: bool,
}

/// Smooth fields: `C_meas` spread over every resolution and η at one α.
#[derive(Clone, Debug, Serialize)]
pub struct ResolutionSummary {
    pub alpha: f64,
    pub c_meas_spread: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyOutcome {
    pub ledger: EstimateLedger,
    pub failures: Vec<RunFailure>,
    pub fields: Vec<FieldSummary>,
    pub resolutions: Vec<ResolutionSummary>,
    pub files: Vec<PathBuf>,
}

impl StudyOutcome {
    pub fn invariants_hold(&self) -> bool {
        self.fields.iter().all(|f| f.passed) && self.resolutions.iter().all(|r| r.passed)
    }
}

type JobResult = (usize, String, CliResult<Vec<EstimateRecord>>);

pub const SPREAD_LIMIT: f64 = 2.0;
pub const C1_LIMIT: f64 = 2.0;
pub const SMOOTH_SPREAD_LIMIT: f64 = 1.1;

fn field_name(cfg: &ExperimentConfig, j: &Job, grid: [usize; 2]) -> String {
    let kind = match cfg.study.field {
        StudyField::Rough => format!("rough-a{:?}-s{}", j.alpha, j.seed),
        StudyField::Smooth => format!("smooth-a{:?}", j.alpha),
    };
    format!("{kind}-{}x{}", grid[0], grid[1])
}

/// Runs the sweep and writes `ledger.csv`, `ledger.json` and `study.json`.
/// Failed runs are recorded and the sweep continues.
pub fn run_study(cfg: &ExperimentConfig) -> CliResult<StudyOutcome> {
    let r = cfg.resolve()?;
    cfg.check_study(&r)?;
    let st = &cfg.study;
    let mut jobs = Vec::new();
    for level in 0..r.levels.len() {
        for &alpha in &st.alphas {
            match st.field {
                StudyField::Rough => jobs.extend(st.seeds.iter().map(|&seed| Job { level, alpha, seed })),
                StudyField::Smooth => jobs.push(Job { level, alpha, seed: 0 }),
            }
        }
    }
    let mut pairs: Vec<Arc<ResolvedPairs>> = Vec::new();
    let mut j_max = Vec::new();
    for l in &r.levels {
        pairs.push(Arc::new(cfg.holder.resolve(&pressure_lab::fields::Chart::Interior(l.grid.clone()))?));
        j_max.push(cfg.j_max_for(&l.grid, st.j_max, "study.j_max")?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs())
        .build()
        .map_err(|e| CliError::Validation(format!("output.jobs: {e}")))?;
    let sink: Mutex<Vec<JobResult>> = Mutex::new(Vec::new());
    pool.install(|| {
        jobs.par_iter().enumerate().for_each(|(k, job)| {
            let level = &r.levels[job.level];
            let g = &level.grid;
            let name = field_name(cfg, job, [g.n_rho(), g.n_phi()]);
            let run = || -> CliResult<Vec<EstimateRecord>> {
                let u = match st.field {
                    StudyField::Rough => rough_field(g, job.alpha, job.seed, j_max[job.level])?,
                    StudyField::Smooth => smooth_field(g, st.wave)?,
                };
                let tag = FieldTag { name: name.clone(), seed: job.seed, alpha: job.alpha };
                Ok(eta_study(&u, &level.etas, &tag, &r.cutoffs, &pairs[job.level], &cfg.solver)?)
            };
            let out = run();
            sink.lock().expect("ledger sink").push((k, name, out));
        })
    });
    let mut results = sink.into_inner().expect("ledger sink");
    results.sort_by_key(|(k, _, _)| *k);
    let mut ledger = EstimateLedger::new();
    let mut failures = Vec::new();
    for (_, name, res) in results {
        match res {
            Ok(recs) => ledger.extend(recs),
            Err(e) => failures.push(RunFailure { field: name, error: e.to_string() }),
        }
    }
    let fields = summarize(&ledger);
    let resolutions = match st.field {
        StudyField::Smooth => st
            .alphas
            .iter()
            .map(|&a| {
                let rs: Vec<&EstimateRecord> = ledger.records().iter().filter(|x| x.alpha == a).collect();
                let spread = sweep_spread(&rs, |x| x.c_meas);
                ResolutionSummary {
                    alpha: a,
                    c_meas_spread: spread,
                    passed: spread.is_some_and(|s| s <= SMOOTH_SPREAD_LIMIT),
                }
            })
            .collect(),
        StudyField::Rough => Vec::new(),
    };
    let dir = &cfg.output.dir;
    let mut out = StudyOutcome { ledger, failures, fields, resolutions, files: Vec::new() };
    out.files.push(write_text(dir, "ledger.csv", &ledger_csv(&out.ledger))?);
    out.files.push(write_json(
        dir,
        "ledger.json",
        &serde_json::json!({ "schema": crate::report::SCHEMA, "records": out.ledger.records(), "failures": &out.failures }),
    )?);
    out.files.push(dir.join("study.json"));
    let passed = out.failures.is_empty() && out.invariants_hold();
    let env = Envelope { schema: crate::report::SCHEMA, command: "study", passed, config: cfg, body: &out };
    write_json(dir, "study.json", &env)?;
    Ok(out)
}

/// `run_study` with the exit policy: failed runs are solver failures,
/// failed summaries are invariant failures.
pub fn cmd_study(cfg: &ExperimentConfig) -> CliResult<StudyOutcome> {
    let out = run_study(cfg)?;
    if let Some(f) = out.failures.first() {
        return Err(CliError::Runs(format!(
            "{} run(s) failed, first {}: {}",
            out.failures.len(),
            f.field,
            f.error
        )));
    }
    if !out.invariants_hold() {
        let bad: Vec<&str> = out.fields.iter().filter(|f| !f.passed).map(|f| f.field.as_str()).collect();
        return Err(CliError::Invariant(format!(
            "estimate checks failed for {} field(s) {:?}, or the resolution spread",
            bad.len(),
            bad
        )));
    }
    Ok(out)
}

fn summarize(ledger: &EstimateLedger) -> Vec<FieldSummary> {
    ledger
        .by_field()
        .into_iter()
        .map(|(field, rs)| {
            let finite = rs.iter().all(|r| r.c_meas.is_some_and(f64::is_finite));
            let spread = sweep_spread(&rs, |r| r.c_meas);
            let mut c1: Option<Vec<f64>> = rs.iter().map(|r| r.c1_meas).collect();
            let c1_ratio = c1.as_mut().map(|v| {
                let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                top / median(v)
            });
            let passed = finite && spread.is_some_and(|s| s <= SPREAD_LIMIT) && c1_ratio.is_some_and(|c| c <= C1_LIMIT);
            FieldSummary {
                field: field.to_string(),
                alpha: rs[0].alpha,
                grid: rs[0].grid,
                runs: rs.len(),
                c_meas_finite: finite,
                c_meas_spread: spread,
                c1_over_median: c1_ratio,
                passed,
            }
        })
        .collect()
}

pub const LEDGER_COLUMNS: &str = "run_id,field,seed,alpha,eta,n_rho,n_phi,uu_holder,p_holder,big_p_holder,big_p_sup,\
p_i_holder,p_b_holder,c_meas,c1_meas,c_i_meas,c_b_meas,cauchy_c0,degenerate,u_holder,u_eta_holder,c0_to_source,\
trace_slope,trace_wall,solver_iterations,solver_residual,compatibility_defect,trace_residual,divergence_max,\
normal_max,round_trip";

/// One row per `(field, η)` run with shortest round-trip floats.
pub fn ledger_csv(ledger: &EstimateLedger) -> String {
    let mut out = String::from(LEDGER_COLUMNS);
    out.push('\n');
    for r in ledger.records() {
        let m = &r.mollifier;
        let cells = [
            r.run_id.clone(),
            r.field.clone(),
            r.seed.to_string(),
            num(r.alpha),
            num(r.eta),
            r.grid[0].to_string(),
            r.grid[1].to_string(),
            num(r.uu_holder),
            num(r.p_holder),
            num(r.big_p_holder),
            num(r.big_p_sup),
            num(r.p_i_holder),
            num(r.p_b_holder),
            opt(r.c_meas),
            opt(r.c1_meas),
            opt(r.c_i_meas),
            opt(r.c_b_meas),
            opt(r.cauchy_c0),
            r.degenerate.to_string(),
            num(r.u_holder),
            num(r.u_eta_holder),
            num(r.c0_to_source),
            num(r.trace_slope),
            num(r.trace_wall),
            r.solver_iterations.to_string(),
            num(r.solver_residual),
            num(r.compatibility_defect),
            num(m.trace_residual),
            num(m.divergence_max),
            num(m.normal_max),
            num(m.round_trip),
        ];
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
