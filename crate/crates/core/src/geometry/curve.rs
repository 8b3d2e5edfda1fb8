use std::f64::consts::TAU;
use std::io::Write;

use super::preset::{CurvePreset, V2};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::spectral::{spectral_derivative, TrigInterpolant};

const PANELS: usize = 256;
const GL_ORDER: usize = 16;

/// Cumulative arc length `s(t)` of a preset by composite Gauss-Legendre.
#[derive(Clone, Debug)]
struct ArcLength {
    cumulative: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn speed(preset: &CurvePreset, t: f64) -> f64 {
    let (_, d1, _) = preset.eval(t);
    d1[0].hypot(d1[1])
}

impl ArcLength {
    fn new(preset: &CurvePreset) -> Self {
        let (nodes, weights) = gauss_legendre(GL_ORDER);
        let mut a = ArcLength {
            cumulative: vec![0.0; PANELS + 1],
            nodes,
            weights,
        };
        let h = TAU / PANELS as f64;
        for p in 0..PANELS {
            let lo = p as f64 * h;
            a.cumulative[p + 1] = a.cumulative[p] + a.panel(preset, lo, lo + h);
        }
        a
    }

    fn panel(&self, preset: &CurvePreset, lo: f64, hi: f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * speed(preset, mid + half * x))
            .sum::<f64>()
            * half
    }

    fn total(&self) -> f64 {
        self.cumulative[PANELS]
    }

    fn at(&self, preset: &CurvePreset, t: f64) -> f64 {
        let turns = (t / TAU).floor();
        let r = t - turns * TAU;
        let h = TAU / PANELS as f64;
        let p = ((r / h) as usize).min(PANELS - 1);
        let lo = p as f64 * h;
        turns * self.total() + self.cumulative[p] + self.panel(preset, lo, r)
    }
}

/// Frame data at one boundary point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    /// Preset parameter.
    pub t: f64,
    /// Arc-length parameter.
    pub theta: f64,
    pub x: V2,
    pub tau: V2,
    /// Interior unit normal `(-τ₂, τ₁)`.
    pub n: V2,
    pub gamma: f64,
}

/// A closed counterclockwise curve reparameterized by arc length, with node
/// tables at `θ_k = kL/N`.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    preset: CurvePreset,
    arc: ArcLength,
    nodes: Vec<CurvePoint>,
    interp: [TrigInterpolant; 3],
    max_residual: f64,
}

impl BoundaryCurve {
    pub fn build(preset: CurvePreset, n_nodes: usize) -> Result<Self> {
        preset.validate()?;
        if n_nodes < 16 || !n_nodes.is_multiple_of(2) {
            return Err(Error::Curve(format!("need an even node count >= 16, got {n_nodes}")));
        }
        let arc = ArcLength::new(&preset);
        let mut curve = BoundaryCurve {
            preset,
            arc,
            nodes: Vec::with_capacity(n_nodes),
            interp: [
                TrigInterpolant::new(&[0.0], 1.0),
                TrigInterpolant::new(&[0.0], 1.0),
                TrigInterpolant::new(&[0.0], 1.0),
            ],
            max_residual: 0.0,
        };
        let l = curve.length();
        let mut t_prev = 0.0;
        for k in 0..n_nodes {
            let theta = k as f64 * l / n_nodes as f64;
            let (t, res) = curve.invert_arclength(theta, t_prev)?;
            curve.max_residual = curve.max_residual.max(res);
            t_prev = t;
            let mut pt = curve.point_at_param(t);
            pt.theta = theta;
            curve.nodes.push(pt);
        }
        let col = |f: fn(&CurvePoint) -> f64, nodes: &[CurvePoint]| -> Vec<f64> {
            nodes.iter().map(f).collect()
        };
        curve.interp = [
            TrigInterpolant::new(&col(|p| p.x[0], &curve.nodes), l),
            TrigInterpolant::new(&col(|p| p.x[1], &curve.nodes), l),
            TrigInterpolant::new(&col(|p| p.gamma, &curve.nodes), l),
        ];
        Ok(curve)
    }

    /// Newton on `s(t) = θ`; returns the parameter and the final step size.
    fn invert_arclength(&self, theta: f64, seed: f64) -> Result<(f64, f64)> {
        let l = self.length();
        let mut t = if seed > 0.0 { seed } else { theta / l * TAU };
        let mut step = f64::INFINITY;
        for _ in 0..60 {
            let r = self.arc.at(&self.preset, t) - theta;
            step = r / speed(&self.preset, t);
            t -= step;
            if step.abs() < 1e-12 {
                return Ok((t, step.abs()));
            }
        }
        Err(Error::Reparameterization { residual: step.abs() })
    }

    pub fn preset(&self) -> &CurvePreset {
        &self.preset
    }

    pub fn length(&self) -> f64 {
        self.arc.total()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[CurvePoint] {
        &self.nodes
    }

    /// Largest Newton step at termination of the reparameterization.
    pub fn reparameterization_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn arclength_of_param(&self, t: f64) -> f64 {
        self.arc.at(&self.preset, t)
    }

    pub fn param_of_arclength(&self, theta: f64) -> Result<f64> {
        let l = self.length();
        let th = theta.rem_euclid(l);
        self.invert_arclength(th, th / l * TAU).map(|(t, _)| t)
    }

    /// Exact frame at preset parameter `t`; `theta` is filled in by arc length.
    pub fn point_at_param(&self, t: f64) -> CurvePoint {
        let (x, d1, d2) = self.preset.eval(t);
        let sp = d1[0].hypot(d1[1]);
        let tau = [d1[0] / sp, d1[1] / sp];
        let kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / (sp * sp * sp);
        CurvePoint {
            t,
            theta: self.arclength_of_param(t).rem_euclid(self.length()),
            x,
            tau,
            n: [-tau[1], tau[0]],
            gamma: -kappa,
        }
    }

    /// Exact frame at arc length `θ`.
    pub fn point_at(&self, theta: f64) -> Result<CurvePoint> {
        let t = self.param_of_arclength(theta)?;
        let mut p = self.point_at_param(t);
        p.theta = theta.rem_euclid(self.length());
        Ok(p)
    }

    /// Signed curvature `γ(θ)` by trigonometric interpolation of the node table.
    pub fn curvature(&self, theta: f64) -> f64 {
        self.interp[2].eval(theta.rem_euclid(self.length()), 0)
    }

    /// Interpolated position `x(θ)` and its derivatives up to order two.
    pub fn interpolated(&self, theta: f64) -> [V2; 3] {
        let th = theta.rem_euclid(self.length());
        let e = |o| [self.interp[0].eval(th, o), self.interp[1].eval(th, o)];
        [e(0), e(1), e(2)]
    }

    pub fn max_abs_curvature(&self) -> f64 {
        self.nodes.iter().map(|p| p.gamma.abs()).fold(0.0, f64::max)
    }

    /// Max over nodes of `|n′ − γτ|` and `|τ′ + γn|` with spectral derivatives
    /// of the frame tables.
    pub fn frenet_residual(&self) -> f64 {
        let l = self.length();
        let comp = |f: &dyn Fn(&CurvePoint) -> f64| -> Vec<f64> {
            spectral_derivative(&self.nodes.iter().map(f).collect::<Vec<_>>(), l, 1)
        };
        let dn = [comp(&|p| p.n[0]), comp(&|p| p.n[1])];
        let dt = [comp(&|p| p.tau[0]), comp(&|p| p.tau[1])];
        self.nodes
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let a = (dn[0][k] - p.gamma * p.tau[0]).hypot(dn[1][k] - p.gamma * p.tau[1]);
                let b = (dt[0][k] + p.gamma * p.n[0]).hypot(dt[1][k] + p.gamma * p.n[1]);
                a.max(b)
            })
            .fold(0.0, f64::max)
    }

    /// Max over nodes of `||x′| − 1|` with spectral derivatives of the position table.
    pub fn speed_residual(&self) -> f64 {
        let l = self.length();
        let d: Vec<Vec<f64>> = (0..2)
            .map(|c| spectral_derivative(&self.nodes.iter().map(|p| p.x[c]).collect::<Vec<_>>(), l, 1))
            .collect();
        (0..self.nodes.len())
            .map(|k| (d[0][k].hypot(d[1][k]) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Writes the node table as CSV with header `theta,x1,x2,tau1,tau2,n1,n2,gamma`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta,x1,x2,tau1,tau2,n1,n2,gamma")?;
        for p in &self.nodes {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                p.theta, p.x[0], p.x[1], p.tau[0], p.tau[1], p.n[0], p.n[1], p.gamma
            )?;
        }
        Ok(())
    }
}

/// Largest collar depth for which `J > 0` and the closest-point map stays
/// single-valued: `min(margin / max|γ|, half the smallest chord between nodes
/// more than π/max|γ| apart along the curve)`.
pub fn reach_estimate(curve: &BoundaryCurve, margin: f64) -> f64 {
    let kmax = curve.max_abs_curvature().max(1e-12);
    let l = curve.length();
    let sep = (std::f64::consts::PI / kmax).min(0.5 * l);
    let nodes = curve.nodes();
    let mut chord = f64::INFINITY;
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            let d = (b.theta - a.theta).abs();
            if d.min(l - d) + 1e-12 * l < sep {
                continue;
            }
            chord = chord.min((a.x[0] - b.x[0]).hypot(a.x[1] - b.x[1]));
        }
    }
    (margin / kmax).min(0.5 * chord)
}
