//! `verify`: the invariant suites of every module on the configured domain.

use std::f64::consts::TAU;
use std::path::PathBuf;

use pressure_lab::elliptic::{InteriorOperator, WallCondition};
use pressure_lab::fields::{divergence, sample_scalar, GridField, InteriorGrid};
use pressure_lab::mollify::{mollify_velocity, recover_stream};
use pressure_lab::norms::{c0_distance, h_minus2_norm, holder_norm, PairPlan};
use pressure_lab::pressure::{adjustment_term, bc_equivalence_check, solve_pressure, split_pb, wall_normal_derivative};
use serde::Serialize;

use crate::config::{ExperimentConfig, Resolved};
use crate::error::{CliError, CliResult};
use crate::field::{rough_field, smooth_field};
use crate::report::{write_json, Envelope};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    /// Upper bound on `value`.
    pub limit: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Suite<'a> {
    checks: &'a mut Vec<Check>,
    suite: &'static str,
}

impl Suite<'_> {
    fn le(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        });
    }
}

fn geometry(r: &Resolved, s: &mut Suite) {
    let curve = r.domain.curve();
    s.le("frenet residual |n′ − γτ|", curve.frenet_residual(), 1e-6);
    s.le("metric residual ||∂θX| − J|", r.domain.chart().metric_residual(33), 1e-6);
    s.le("arc-length speed residual", curve.speed_residual(), 1e-10);
    if let Some(radius) = r.domain.preset().circle_radius() {
        let worst = curve.nodes().iter().map(|p| (p.gamma + 1.0 / radius).abs()).fold(0.0, f64::max);
        s.le("circle curvature γ = −1/R", worst, 1e-10);
    }
}

fn fields(g: &std::sync::Arc<InteriorGrid>, s: &mut Suite) -> CliResult<()> {
    let u = smooth_field(g, [1.0, 2.0])?;
    s.le("divergence of ∇⊥ψ", divergence(&u)?.sup_norm(), 1e-10);
    let n = g.n_rho() - 1;
    let worst = (0..g.n_phi())
        .map(|j| {
            let c = g.wall(j);
            (u.comp(0)[[n, j]] * c.n[0] + u.comp(1)[[n, j]] * c.n[1]).abs()
        })
        .fold(0.0, f64::max);
    s.le("wall tangency of ∇⊥ψ", worst, 1e-10);
    Ok(())
}

fn norms(s: &mut Suite) -> CliResult<()> {
    let n = 256;
    let v: Vec<f64> = (0..n).map(|k| (TAU * k as f64 / n as f64).cos()).collect();
    s.le("H⁻² norm of cos θ", (h_minus2_norm(&v, TAU)? - 0.5 / 2f64.sqrt()).abs(), 1e-12);
    Ok(())
}

fn elliptic(cfg: &ExperimentConfig, r: &Resolved, s: &mut Suite) -> CliResult<()> {
    let g = InteriorGrid::new(r.domain.clone(), 48, 96)?;
    let f = sample_scalar(&g, |x| 1.0 + x[0] * x[1] - 0.5 * x[0]);
    let op = InteriorOperator::new(g.clone(), WallCondition::Neumann, cfg.solver)?;
    let fint: f64 = op.volumes().iter().zip(f.comp(0).iter()).map(|(v, f)| v * f).sum();
    let wall: f64 = op.wall_lengths().iter().sum();
    let gv = vec![fint / wall; g.n_phi()];
    let x0 = sample_scalar(&g, |x| 3.0 * (5.0 * x[0]).sin() + x[1]);
    let (a, ra) = op.solve_neumann(&f, &gv, 0.0, None)?;
    let (b, _) = op.solve_neumann(&f, &gv, 0.0, Some(&x0))?;
    s.le("Neumann uniqueness from two starts", a.sub(&b)?.sup_norm(), 1e-8);
    s.le("Neumann residual", ra.residual, cfg.solver.tolerance);
    Ok(())
}

fn mollify(cfg: &ExperimentConfig, r: &Resolved, s: &mut Suite) -> CliResult<()> {
    let level = &r.levels[0];
    let g = &level.grid;
    let alpha = 1.0 / 3.0;
    let j = cfg.j_max_for(g, cfg.study.j_max, "study.j_max")?;
    let u = rough_field(g, alpha, 7, j)?;
    s.le("stream recovery round trip", recover_stream(&u)?.round_trip, 1e-9);
    let plan = PairPlan { random_pairs: 20_000, ..cfg.holder };
    let base = holder_norm(&u, alpha, &plan)?.norm();
    let mut prev = f64::INFINITY;
    let mut monotone = 0.0;
    for &eta in &level.etas {
        let rv = mollify_velocity(&u, eta, &r.cutoffs)?;
        let d = &rv.diagnostics;
        s.le(format!("η={eta}: wall |u^η·n|"), d.normal_max, 1e-8);
        s.le(format!("η={eta}: discrete divergence"), d.divergence_max, 1e-8);
        s.le(format!("η={eta}: collar stream trace"), d.trace_residual, 1e-10);
        s.le(format!("η={eta}: Hölder ratio"), holder_norm(&rv.u_eta, alpha, &plan)?.norm() / base, 5.0);
        let dist = c0_distance(&rv.u_eta, &u)?;
        if dist >= prev {
            monotone = 1.0;
        }
        prev = dist;
    }
    s.le("C⁰ distance decreasing over the sweep", monotone, 0.0);
    Ok(())
}

fn pressure(cfg: &ExperimentConfig, r: &Resolved, s: &mut Suite) -> CliResult<()> {
    let g = &r.levels[0].grid;
    let c = &r.cutoffs;
    let u = smooth_field(g, [1.0, 2.0])?;
    let sol = solve_pressure(&u, c, &cfg.solver)?;
    let adj = adjustment_term(&u, c)?;
    s.le("P − p − φ(u·n)²", sol.big_p.sub(&sol.p)?.sub(&adj)?.sup_norm(), 1e-14);
    s.le("boundary condition equivalence", bc_equivalence_check(&sol.p, &u)?, 5e-2);
    let split = split_pb(&u, &sol, &cfg.solver, 10, 1)?;
    let probes = split.probes.iter().map(|p| (p.sum() - p.p_bi).abs()).fold(0.0, f64::max);
    s.le("Green-term sum at probes", probes, 5e-3);
    if r.domain.preset().circle_radius() == Some(1.0) {
        let rigid = pressure_lab::fields::sample_vector(g, |x| [-x[1], x[0]]);
        let sol = solve_pressure(&rigid, c, &cfg.solver)?;
        let exact: GridField = sample_scalar(g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1]) - 0.25);
        s.le("rigid rotation pressure", sol.p.sub(&exact)?.sup_norm(), 1e-3);
        let dn = wall_normal_derivative(&sol.p)?;
        s.le("rigid rotation ∂ₙp + 1", dn.iter().map(|v| (v + 1.0).abs()).fold(0.0, f64::max), 5e-2);
    }
    Ok(())
}

/// Runs every suite and writes `verify.json`. Err on invalid configuration or
/// a failing solve; `Ok` carries the per-check outcome.
pub fn run_verify(cfg: &ExperimentConfig) -> CliResult<VerifyReport> {
    let r = cfg.resolve()?;
    let mut checks = Vec::new();
    geometry(&r, &mut Suite { checks: &mut checks, suite: "geometry" });
    fields(&r.levels[0].grid, &mut Suite { checks: &mut checks, suite: "fields" })?;
    norms(&mut Suite { checks: &mut checks, suite: "norms" })?;
    elliptic(cfg, &r, &mut Suite { checks: &mut checks, suite: "elliptic" })?;
    mollify(cfg, &r, &mut Suite { checks: &mut checks, suite: "mollify" })?;
    pressure(cfg, &r, &mut Suite { checks: &mut checks, suite: "pressure" })?;
    let report = VerifyReport { checks, files: vec![cfg.output.dir.join("verify.json")] };
    let env = Envelope { schema: crate::report::SCHEMA, command: "verify", passed: report.passed(), config: cfg, body: &report };
    write_json(&cfg.output.dir, "verify.json", &env)?;
    Ok(report)
}

pub fn cmd_verify(cfg: &ExperimentConfig) -> CliResult<VerifyReport> {
    let report = run_verify(cfg)?;
    if !report.passed() {
        let bad: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.suite, c.name)).collect();
        return Err(CliError::Invariant(bad.join("; ")));
    }
    Ok(report)
}
