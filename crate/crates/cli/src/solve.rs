//! `solve`: one pressure solve with trace diagnostics and field dumps.

use std::path::PathBuf;

use pressure_lab::elliptic::{InteriorOperator, LinearSolveReport, WallCondition};
use pressure_lab::fields::sample_scalar;
use pressure_lab::mollify::mollify_velocity;
use pressure_lab::norms::holder_norm;
use pressure_lab::pressure::{
    bc_equivalence_check, boundary_trace, eta_study, solve_pressure, EstimateRecord, FieldTag, PressureSolution,
    TraceCurve,
};
use serde::Serialize;

use crate::config::{ExperimentConfig, FieldSpec};
use crate::error::CliResult;
use crate::field::{build, oracle};
use crate::report::{field_csv, trace_csv, write_json, write_text, Envelope};

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub field: FieldSpec,
    pub grid: [usize; 2],
    pub eta: Option<f64>,
    pub alpha: f64,
    pub solver: LinearSolveReport,
    /// `max |p − p_exact|` after mean matching, for the radial families.
    pub oracle_error: Option<f64>,
    pub bc_defect: f64,
    pub p_sup: f64,
    pub big_p_sup: f64,
    pub c_meas: Option<f64>,
    pub trace: TraceCurve,
    /// η-sweep records of a rough field.
    pub records: Vec<EstimateRecord>,
    pub files: Vec<PathBuf>,
}

pub fn cmd_solve(cfg: &ExperimentConfig) -> CliResult<SolveReport> {
    let r = cfg.resolve_for(matches!(cfg.field, FieldSpec::Rough { .. }))?;
    cfg.check_field(&r)?;
    let level = &r.levels[0];
    let g = &level.grid;
    let j_max = match &cfg.field {
        FieldSpec::Rough { j_max, .. } => cfg.j_max_for(g, *j_max, "field.j_max")?,
        _ => 0,
    };
    let u = build(g, &cfg.field, j_max)?;
    let (alpha, mut records) = match &cfg.field {
        FieldSpec::Rough { alpha, seed, .. } => {
            let pairs = cfg.holder.resolve(u.chart())?;
            let tag = FieldTag { name: format!("rough-a{alpha:?}-s{seed}"), seed: *seed, alpha: *alpha };
            (*alpha, eta_study(&u, &level.etas, &tag, &r.cutoffs, &pairs, &cfg.solver)?)
        }
        _ => (cfg.study.alphas.first().copied().unwrap_or(0.5), Vec::new()),
    };
    let (eta, sol, u_used): (Option<f64>, PressureSolution, _) = match &cfg.field {
        FieldSpec::Rough { .. } => {
            let eta = *level.etas.last().expect("validated sweep");
            let rv = mollify_velocity(&u, eta, &r.cutoffs)?;
            let sol = pressure_lab::pressure::solve_regularized(&rv, &r.cutoffs, &cfg.solver)?;
            (Some(eta), sol, rv.u_eta)
        }
        _ => (None, solve_pressure(&u, &r.cutoffs, &cfg.solver)?, u),
    };
    let oracle_error = match oracle(&cfg.field) {
        Some(q) => {
            let exact = sample_scalar(g, &q);
            let op = InteriorOperator::new(g.clone(), WallCondition::Neumann, cfg.solver)?;
            let shift = op.mean(exact.comp(0));
            let exact = sample_scalar(g, |x| q(x) - shift);
            Some(sol.p.sub(&exact)?.sup_norm())
        }
        None => None,
    };
    let trace = boundary_trace(&sol, &u_used, r.cutoffs.delta3)?;
    let c_meas = match records.last() {
        Some(rec) => rec.c_meas,
        None => {
            let uu = holder_norm(&u_used.outer_self()?, alpha, &cfg.holder)?.norm();
            let pp = holder_norm(&sol.big_p, alpha, &cfg.holder)?.norm();
            (uu > 0.0).then(|| pp / uu)
        }
    };
    let dir = &cfg.output.dir;
    let files = vec![
        write_text(dir, "p.csv", &field_csv(&sol.p))?,
        write_text(dir, "P.csv", &field_csv(&sol.big_p))?,
        write_text(dir, "trace.csv", &trace_csv(&trace))?,
    ];
    records.sort_by(|a, b| a.run_id.cmp(&b.run_id));
    let mut report = SolveReport {
        field: cfg.field.clone(),
        grid: [g.n_rho(), g.n_phi()],
        eta,
        alpha,
        solver: sol.report.clone(),
        oracle_error,
        bc_defect: bc_equivalence_check(&sol.p, &u_used)?,
        p_sup: sol.p.sup_norm(),
        big_p_sup: sol.big_p.sup_norm(),
        c_meas,
        trace,
        records,
        files,
    };
    let path = dir.join("report.json");
    report.files.push(path);
    let env = Envelope { schema: crate::report::SCHEMA, command: "solve", passed: true, config: cfg, body: &report };
    write_json(dir, "report.json", &env)?;
    Ok(report)
}
