use std::sync::Arc;

use ndarray::Array2;
use crate::elliptic::{InteriorOperator, LinearSolveReport, SolverSettings, WallCondition};
use crate::error::{Error, Result};
use crate::fields::stencil::one_sided_end;
use crate::fields::{momentum_flux, Chart, GridField, InteriorGrid};
use crate::geometry::CutoffProfile;
use crate::mollify::RegularizedVelocity;

/// Pressure `p` (mean zero), adjusted pressure `P = p + φ(u·n)²` and the
/// cutoff pieces `P_i = φ_i P`, `P_b = φ_b P`.
#[derive(Clone, Debug)]
pub struct PressureSolution {
    pub p: GridField,
    pub big_p: GridField,
    pub p_i: GridField,
    pub p_b: GridField,
    pub report: LinearSolveReport,
    pub source: String,
    pub eta: Option<f64>,
    pub cutoffs: CutoffProfile,
}

/// Depth `s` of each interior node (`+∞` beyond the chart) and the unit
/// normal at its foot point.
pub(crate) fn node_frames(g: &InteriorGrid) -> Vec<(f64, [f64; 2])> {
    g.collar_coords()
        .iter()
        .map(|c| c.map_or((f64::INFINITY, [0.0, 0.0]), |c| (c.s, c.foot.n)))
        .collect()
}

/// `φ(d)(u·n)²` on the interior nodes, with `n` carried along the normals.
pub fn adjustment_term(u: &GridField, cutoffs: &CutoffProfile) -> Result<GridField> {
    let g = u.chart().interior()?.clone();
    let m = g.n_phi();
    let frames = node_frames(&g);
    let (u1, u2) = (u.comp(0), u.comp(1));
    let v = Array2::from_shape_fn(g.shape(), |(i, j)| {
        let (s, n) = frames[i * m + j];
        if s.is_finite() {
            let un = u1[[i, j]] * n[0] + u2[[i, j]] * n[1];
            cutoffs.phi(s) * un * un
        } else {
            0.0
        }
    });
    GridField::scalar(Chart::Interior(g), v)
}

/// `γ(u·τ)²` at the wall nodes.
pub fn wall_neumann_data(u: &GridField) -> Result<Vec<f64>> {
    let g = u.chart().interior()?;
    let (n, m) = g.shape();
    Ok((0..m)
        .map(|j| {
            let w = g.wall(j);
            let ut = u.comp(0)[[n - 1, j]] * w.tau[0] + u.comp(1)[[n - 1, j]] * w.tau[1];
            w.gamma * ut * ut
        })
        .collect())
}

/// `−∮(w·n + γ(u·τ)²) dℓ`: how far the implied wall flux `−w·n` is from the
/// prescribed `γ(u·τ)²`, in the units of `∫f − ∮g`.
fn wall_flux_mismatch(op: &InteriorOperator, w: &GridField, u: &GridField) -> Result<f64> {
    let g = u.chart().interior()?;
    let n = g.n_rho();
    let data = wall_neumann_data(u)?;
    Ok(-(0..g.n_phi())
        .map(|j| {
            let c = g.wall(j);
            let wn = w.comp(0)[[n - 1, j]] * c.n[0] + w.comp(1)[[n - 1, j]] * c.n[1];
            (wn + data[j]) * op.wall_lengths()[j]
        })
        .sum::<f64>())
}

pub(crate) fn max_wall_normal(u: &GridField) -> Result<f64> {
    let g = u.chart().interior()?;
    let (n, m) = g.shape();
    Ok((0..m)
        .map(|j| {
            let w = g.wall(j);
            (u.comp(0)[[n - 1, j]] * w.n[0] + u.comp(1)[[n - 1, j]] * w.n[1]).abs()
        })
        .fold(0.0, f64::max))
}

/// `∂_n q` at the wall (interior normal) from the three-point one-sided
/// radial difference and the centered angular one.
pub fn wall_normal_derivative(q: &GridField) -> Result<Vec<f64>> {
    let g = q.chart().interior()?;
    let (n, m) = g.shape();
    let v = q.comp(0);
    let dr = one_sided_end(v, g.h(), false);
    let hp = g.h_phi();
    Ok((0..m)
        .map(|j| {
            let dp = (v[[n - 1, (j + 1) % m]] - v[[n - 1, (j + m - 1) % m]]) / (2.0 * hp);
            let geo = g.node(n - 1, j);
            let (a, b) = (geo.d_rho, geo.d_phi);
            let det = a[0] * b[1] - a[1] * b[0];
            let gx = (dr[j] * b[1] - dp * a[1]) / det;
            let gy = (dp * a[0] - dr[j] * b[0]) / det;
            let nn = g.wall(j).n;
            gx * nn[0] + gy * nn[1]
        })
        .collect())
}

fn cutoff_pieces(big_p: &GridField, cutoffs: &CutoffProfile) -> Result<(GridField, GridField)> {
    let g = big_p.chart().interior()?.clone();
    let m = g.n_phi();
    let frames = node_frames(&g);
    let v = big_p.comp(0);
    let piece = |w: &dyn Fn(f64) -> f64| {
        Array2::from_shape_fn(g.shape(), |(i, j)| {
            let wv = w(frames[i * m + j].0);
            if wv == 1.0 {
                v[[i, j]]
            } else {
                wv * v[[i, j]]
            }
        })
    };
    let pi = piece(&|s| if s.is_finite() { cutoffs.phi_i(s) } else { 1.0 });
    let pb = piece(&|s| if s.is_finite() { cutoffs.phi_b(s) } else { 0.0 });
    Ok((GridField::scalar(Chart::Interior(g.clone()), pi)?, GridField::scalar(Chart::Interior(g), pb)?))
}

/// Solves `−Δp = ∂ᵢ∂ⱼ(uᵢuⱼ)`, `∂_n p = γ(u·τ)²`, mean zero, and forms `P`.
pub fn solve_pressure(u: &GridField, cutoffs: &CutoffProfile, settings: &SolverSettings) -> Result<PressureSolution> {
    let g = u.chart().interior()?.clone();
    let op = InteriorOperator::new(g, WallCondition::Neumann, *settings)?;
    solve_pressure_with(&op, u, cutoffs, "velocity", None)
}

pub fn solve_regularized(r: &RegularizedVelocity, cutoffs: &CutoffProfile, settings: &SolverSettings) -> Result<PressureSolution> {
    let g = r.u_eta.chart().interior()?.clone();
    let op = InteriorOperator::new(g, WallCondition::Neumann, *settings)?;
    solve_pressure_with(&op, &r.u_eta, cutoffs, &r.provenance.source, Some(r.eta))
}

/// As [`solve_pressure`] with a prebuilt operator.
pub fn solve_pressure_with(op: &InteriorOperator, u: &GridField, cutoffs: &CutoffProfile, source: &str, eta: Option<f64>) -> Result<PressureSolution> {
    if u.n_components() != 2 {
        return Err(Error::Shape("expected a velocity field".into()));
    }
    cutoffs.validate()?;
    let normal = max_wall_normal(u)?;
    let tol = 1e-6 * (1.0 + u.sup_norm());
    if normal > tol {
        return Err(Error::Precondition(format!("velocity is not tangential: max |u·n| = {normal:e} exceeds {tol:e}")));
    }
    let w = momentum_flux(u)?;
    let (p, mut report) = op.solve_neumann_load(op.flux_load(&w)?, 0.0, None)?;
    report.compatibility_defect = Some(wall_flux_mismatch(op, &w, u)?);
    let big_p = p.add(&adjustment_term(u, cutoffs)?)?;
    let (p_i, p_b) = cutoff_pieces(&big_p, cutoffs)?;
    Ok(PressureSolution {
        p,
        big_p,
        p_i,
        p_b,
        report,
        source: source.to_string(),
        eta,
        cutoffs: *cutoffs,
    })
}

/// `sup_θ |∂_n(p + (u·n)²) − γ(u·τ)²|` at the wall.
pub fn bc_equivalence_check(p: &GridField, u: &GridField) -> Result<f64> {
    let g: &Arc<InteriorGrid> = p.chart().interior()?;
    let m = g.n_phi();
    let frames = node_frames(g);
    let (u1, u2) = (u.comp(0), u.comp(1));
    let un2 = Array2::from_shape_fn(g.shape(), |(i, j)| {
        let (s, n) = frames[i * m + j];
        if s.is_finite() {
            let un = u1[[i, j]] * n[0] + u2[[i, j]] * n[1];
            un * un
        } else {
            0.0
        }
    });
    let q = p.add(&GridField::scalar(p.chart().clone(), un2)?)?;
    let dn = wall_normal_derivative(&q)?;
    let target = wall_neumann_data(u)?;
    Ok(dn.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}
