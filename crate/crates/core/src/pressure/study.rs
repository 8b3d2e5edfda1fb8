use serde::{Deserialize, Serialize};

use super::solve::solve_pressure_with;
use super::trace::boundary_trace;
use crate::elliptic::{InteriorOperator, SolverSettings, WallCondition};
use crate::error::Result;
use crate::fields::GridField;
use crate::geometry::CutoffProfile;
use crate::mollify::{mollify_stream, recover_stream, MollifyDiagnostics};
use crate::norms::{c0_distance, holder_norm_with, ResolvedPairs};

/// One `(field, η)` run of the η study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub run_id: String,
    pub field: String,
    pub seed: u64,
    pub alpha: f64,
    pub eta: f64,
    pub grid: [usize; 2],
    pub uu_holder: f64,
    pub p_holder: f64,
    pub big_p_holder: f64,
    pub big_p_sup: f64,
    pub p_i_holder: f64,
    pub p_b_holder: f64,
    /// `‖P‖_α / ‖u⊗u‖_α`.
    pub c_meas: Option<f64>,
    /// `‖P‖_∞ / ‖u⊗u‖_α`.
    pub c1_meas: Option<f64>,
    pub c_i_meas: Option<f64>,
    pub c_b_meas: Option<f64>,
    /// `‖p^η − p^{η_prev}‖_∞` against the previous (larger) η.
    pub cauchy_c0: Option<f64>,
    pub degenerate: bool,
    /// `‖u‖_α` of the unregularized field and `‖u^η‖_α`.
    pub u_holder: f64,
    pub u_eta_holder: f64,
    /// `‖u^η − u‖_∞`.
    pub c0_to_source: f64,
    /// Least-squares slope of the trace distance against `−s` over `s ≤ δ₃`.
    pub trace_slope: f64,
    pub trace_wall: f64,
    pub solver_iterations: usize,
    pub solver_residual: f64,
    pub compatibility_defect: f64,
    pub mollifier: MollifyDiagnostics,
}

/// Append-only list of study records.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateLedger {
    records: Vec<EstimateRecord>,
}

impl EstimateLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: EstimateRecord) {
        self.records.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = EstimateRecord>) {
        self.records.extend(rs);
    }

    pub fn records(&self) -> &[EstimateRecord] {
        &self.records
    }

    /// Records grouped by field descriptor, in first-seen order.
    pub fn by_field(&self) -> Vec<(&str, Vec<&EstimateRecord>)> {
        let mut out: Vec<(&str, Vec<&EstimateRecord>)> = Vec::new();
        for r in &self.records {
            match out.iter_mut().find(|(f, _)| *f == r.field) {
                Some((_, v)) => v.push(r),
                None => out.push((&r.field, vec![r])),
            }
        }
        out
    }
}

/// Spread `max/min` of a quantity over a field's sweep; `None` if any value is missing.
pub fn sweep_spread(rs: &[&EstimateRecord], f: impl Fn(&EstimateRecord) -> Option<f64>) -> Option<f64> {
    let v: Option<Vec<f64>> = rs.iter().map(|r| f(r)).collect();
    let v = v?;
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    (min > 0.0).then(|| max / min)
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Field descriptor of a study run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldTag {
    pub name: String,
    pub seed: u64,
    pub alpha: f64,
}

/// Mollifies `u` at each `η` (in the given order), solves for the pressure
/// and records the measured constants.
pub fn eta_study(
    u: &GridField,
    etas: &[f64],
    tag: &FieldTag,
    cutoffs: &CutoffProfile,
    pairs: &ResolvedPairs,
    settings: &SolverSettings,
) -> Result<Vec<EstimateRecord>> {
    let grid = u.chart().interior()?.clone();
    let op = InteriorOperator::new(grid.clone(), WallCondition::Neumann, *settings)?;
    let rec = recover_stream(u)?;
    let alpha = tag.alpha;
    let u_holder = holder_norm_with(u, alpha, pairs)?.norm();
    let mut out = Vec::with_capacity(etas.len());
    let mut prev: Option<GridField> = None;
    for (k, &eta) in etas.iter().enumerate() {
        let rv = mollify_stream(&rec.psi, eta, cutoffs, rec.round_trip, &tag.name)?;
        let sol = solve_pressure_with(&op, &rv.u_eta, cutoffs, &tag.name, Some(eta))?;
        let uu = holder_norm_with(&rv.u_eta.outer_self()?, alpha, pairs)?.norm();
        let norm = |f: &GridField| holder_norm_with(f, alpha, pairs).map(|h| h.norm());
        let big_p_holder = norm(&sol.big_p)?;
        let p_i_holder = norm(&sol.p_i)?;
        let p_b_holder = norm(&sol.p_b)?;
        let big_p_sup = sol.big_p.sup_norm();
        let trace = boundary_trace(&sol, &rv.u_eta, cutoffs.delta3)?;
        let degenerate = uu == 0.0;
        let ratio = |x: f64| (!degenerate).then(|| x / uu);
        let cauchy_c0 = match &prev {
            Some(q) => Some(c0_distance(&sol.p, q)?),
            None => None,
        };
        out.push(EstimateRecord {
            run_id: format!("{}/eta{}", tag.name, k),
            field: tag.name.clone(),
            seed: tag.seed,
            alpha,
            eta,
            grid: [grid.n_rho(), grid.n_phi()],
            uu_holder: uu,
            p_holder: norm(&sol.p)?,
            big_p_holder,
            big_p_sup,
            p_i_holder,
            p_b_holder,
            c_meas: ratio(big_p_holder),
            c1_meas: ratio(big_p_sup),
            c_i_meas: ratio(p_i_holder),
            c_b_meas: ratio(p_b_holder),
            cauchy_c0,
            degenerate,
            u_holder,
            u_eta_holder: norm(&rv.u_eta)?,
            c0_to_source: c0_distance(&rv.u_eta, u)?,
            trace_slope: trace.slope,
            trace_wall: trace.wall_extrapolated,
            solver_iterations: sol.report.iterations,
            solver_residual: sol.report.residual,
            compatibility_defect: sol.report.compatibility_defect.unwrap_or(0.0),
            mollifier: rv.diagnostics,
        });
        prev = Some(sol.p);
    }
    Ok(out)
}
