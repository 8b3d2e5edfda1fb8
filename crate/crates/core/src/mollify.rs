//! Tangency- and divergence-preserving regularization `u ↦ u^η`.
//!
//! The stream function is split by the collar cutoff `φ`. The interior part
//! is convolved in `x`; the boundary part is odd-extended across `s = 0` and
//! convolved in `(s, θ)`. Velocities are taken as `∇⊥` of the recombined stream
//! function on the grid, so they stay exactly divergence-free and tangential.

use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    cubic_weights, divergence, resample_to_collar, resample_to_interior, stream_to_velocity, Chart,
    CollarGrid, GridField, InteriorGrid, InteriorSampler, StreamFunction,
};
use crate::geometry::CutoffProfile;
use crate::quadrature::integrate;

/// `exp(−1/(1−r²))` on `r < 1`.
pub fn bump(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

fn bump_dr(r: f64) -> f64 {
    if r < 1.0 {
        let q = 1.0 - r * r;
        -2.0 * r / (q * q) * bump(r)
    } else {
        0.0
    }
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| TAU * integrate(|r| r * bump(r), 0.0, 1.0, 64, 16))
}

/// Radial bump `ρ_η` of support radius `η`, discretized as a lattice rule of
/// spacing `η/m` whose weights are normalized to unit mass.
#[derive(Clone, Debug)]
pub struct MollifierKernel {
    eta: f64,
    lattice: usize,
    taps: Vec<([f64; 2], f64)>,
}

impl MollifierKernel {
    pub const DEFAULT_LATTICE: usize = 6;

    pub fn new(eta: f64) -> Result<Self> {
        Self::with_lattice(eta, Self::DEFAULT_LATTICE)
    }

    pub fn with_lattice(eta: f64, lattice: usize) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Config(format!("mollifier scale η = {eta} must be positive")));
        }
        if lattice < 2 {
            return Err(Error::Config("kernel lattice needs at least 2 points per radius".into()));
        }
        let m = lattice as i64;
        let step = eta / lattice as f64;
        let mut taps = Vec::new();
        for a in -m..=m {
            for b in -m..=m {
                let r = ((a * a + b * b) as f64).sqrt() / lattice as f64;
                let w = bump(r);
                if w > 0.0 {
                    taps.push(([a as f64 * step, b as f64 * step], w));
                }
            }
        }
        let total: f64 = taps.iter().map(|t| t.1).sum();
        taps.iter_mut().for_each(|t| t.1 /= total);
        Ok(MollifierKernel { eta, lattice, taps })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lattice(&self) -> usize {
        self.lattice
    }

    /// Quadrature offsets and weights.
    pub fn taps(&self) -> &[([f64; 2], f64)] {
        &self.taps
    }

    pub fn mass(&self) -> f64 {
        self.taps.iter().map(|t| t.1).sum()
    }

    /// `ρ_η(y) = η⁻² ρ(|y|/η)` with `∫ρ = 1`.
    pub fn value(&self, y: [f64; 2]) -> f64 {
        let r = y[0].hypot(y[1]) / self.eta;
        bump(r) / (bump_mass() * self.eta * self.eta)
    }

    pub fn gradient(&self, y: [f64; 2]) -> [f64; 2] {
        let d = y[0].hypot(y[1]);
        if d == 0.0 {
            return [0.0, 0.0];
        }
        let g = bump_dr(d / self.eta) / (bump_mass() * self.eta.powi(3) * d);
        [g * y[0], g * y[1]]
    }

    pub fn id(&self) -> String {
        format!("bump(eta={},lattice={})", self.eta, self.lattice)
    }
}

/// Guard bounds on η for a given grid and cutoff profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaWindow {
    pub min: f64,
    pub max: f64,
}

impl EtaWindow {
    pub fn new(grid: &InteriorGrid, cutoffs: &CutoffProfile) -> Self {
        let chart = grid.domain().chart().delta();
        EtaWindow {
            min: 2.0 * grid.radial_spacing(),
            max: (0.25 * cutoffs.epsilon).min(chart - cutoffs.delta),
        }
    }

    pub fn contains(&self, eta: f64) -> bool {
        eta >= self.min * (1.0 - 1e-12) && eta <= self.max * (1.0 + 1e-12)
    }

    pub fn check(&self, eta: f64) -> Result<()> {
        if self.contains(eta) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "η = {eta} outside the admissible window [{}, {}] (η ≥ 2 radial cells, η ≤ ε/4, δ + η within the chart)",
                self.min, self.max
            )))
        }
    }
}

/// `{ε/4, ε/8, ε/16, ε/32}` restricted to the admissible window.
pub fn eta_sweep(grid: &InteriorGrid, cutoffs: &CutoffProfile) -> Vec<f64> {
    let w = EtaWindow::new(grid, cutoffs);
    [4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|d| cutoffs.epsilon / d)
        .filter(|&e| w.contains(e))
        .collect()
}

fn wall_normal_max(u: &GridField) -> Result<f64> {
    let g = u.chart().interior()?;
    let (n, m) = g.shape();
    let (u1, u2) = (u.comp(0), u.comp(1));
    Ok((0..m)
        .map(|j| {
            let nn = g.wall(j).n;
            (u1[[n - 1, j]] * nn[0] + u2[[n - 1, j]] * nn[1]).abs()
        })
        .fold(0.0, f64::max))
}

/// Stream function recovered from a velocity, with the round-trip error
/// `‖∇⊥ψ − u‖_∞`.
#[derive(Clone, Debug)]
pub struct RecoveredStream {
    pub psi: StreamFunction,
    pub round_trip: f64,
}

/// Recovers `ψ` with `∇⊥ψ = u` and `ψ = 0` on the wall by integrating the
/// radial difference `D_ρψ = ∂_ρx · ∇ψ` inward along each ray. For `u` that
/// is a discrete `∇⊥` field the inversion is exact.
pub fn recover_stream(u: &GridField) -> Result<RecoveredStream> {
    recover_stream_with(u, 1e-6)
}

pub fn recover_stream_with(u: &GridField, tol: f64) -> Result<RecoveredStream> {
    let g = u.chart().interior()?.clone();
    if u.n_components() != 2 {
        return Err(Error::Shape("expected a velocity field".into()));
    }
    let scale = 1.0 + u.sup_norm();
    let div = divergence(u)?.sup_norm();
    if div > tol * scale {
        return Err(Error::Precondition(format!(
            "velocity is not divergence-free: max |div u| = {div:e} exceeds {:e}",
            tol * scale
        )));
    }
    let normal = wall_normal_max(u)?;
    if normal > tol * scale {
        return Err(Error::Precondition(format!(
            "velocity is not tangential: max |u·n| = {normal:e} exceeds {:e}",
            tol * scale
        )));
    }
    let (n, m) = g.shape();
    let h = g.h();
    let (u1, u2) = (u.comp(0), u.comp(1));
    let mut psi = Array2::zeros((n, m));
    for j in 0..m {
        let d: Vec<f64> = (0..n)
            .map(|i| {
                let e = g.node(i, j).d_rho;
                e[0] * u2[[i, j]] - e[1] * u1[[i, j]]
            })
            .collect();
        let mut col = vec![0.0; n];
        col[n - 3] = -2.0 * h * d[n - 2];
        // Wall closure (2, −3.5, 2, −0.5)/h with ψ_{n−4} = ψ_{n−2} − 2h d_{n−3}.
        col[n - 2] = (2.0 * col[n - 3] + h * d[n - 3] - h * d[n - 1]) / 4.0;
        for i in (1..n - 2).rev() {
            col[i - 1] = col[i + 1] - 2.0 * h * d[i];
        }
        for i in 0..n {
            psi[[i, j]] = col[i];
        }
    }
    let psi = StreamFunction::new(GridField::scalar(Chart::Interior(g), psi)?, 0.0)?;
    let round_trip = stream_to_velocity(&psi).sub(u)?.sup_norm();
    Ok(RecoveredStream { psi, round_trip })
}

/// `ψ_b = φψ` on the collar and `ψ_i = (1−φ)ψ` on the interior grid.
#[derive(Clone, Debug)]
pub struct SplitStream {
    pub boundary: GridField,
    pub interior: GridField,
    /// `φψ` at the interior nodes.
    pub boundary_nodes: GridField,
}

/// Depth of every interior node, `+∞` where the node is deeper than the chart.
fn node_depths(g: &InteriorGrid) -> Vec<f64> {
    g.collar_coords().iter().map(|c| c.map_or(f64::INFINITY, |c| c.s)).collect()
}

pub fn split_stream(psi: &StreamFunction, cutoffs: &CutoffProfile, collar: &Arc<CollarGrid>) -> Result<SplitStream> {
    if collar.depth() < cutoffs.delta * (1.0 - 1e-12) {
        return Err(Error::Config(format!(
            "collar depth {} does not cover the cutoff support δ = {}",
            collar.depth(),
            cutoffs.delta
        )));
    }
    let g = psi.grid().clone();
    let m = g.n_phi();
    let depth = node_depths(&g);
    let v = psi.values();
    let weight = Array2::from_shape_fn(g.shape(), |(i, j)| cutoffs.phi(depth[i * m + j]));
    let b_nodes = &weight * v;
    let i_nodes = v - &b_nodes;
    let on_collar = resample_to_collar(psi.field(), collar)?;
    let mut boundary = on_collar.into_comps().pop().unwrap();
    for ((i, _), val) in boundary.indexed_iter_mut() {
        *val *= cutoffs.phi(collar.s(i));
    }
    Ok(SplitStream {
        boundary: GridField::scalar(Chart::Collar(collar.clone()), boundary)?,
        interior: GridField::scalar(Chart::Interior(g.clone()), i_nodes)?,
        boundary_nodes: GridField::scalar(Chart::Interior(g), b_nodes)?,
    })
}

/// Odd extension of a collar field to `s ∈ [−depth, depth]`. Row `k` holds
/// `s = (k − (n_s − 1)) h_s`.
#[derive(Clone, Debug)]
pub struct OddExtension {
    collar: Arc<CollarGrid>,
    values: Array2<f64>,
}

pub fn odd_extend(f: &GridField) -> Result<OddExtension> {
    let collar = f.chart().collar()?.clone();
    if f.n_components() != 1 {
        return Err(Error::Shape("expected a scalar collar field".into()));
    }
    let v = f.comp(0);
    let trace = v.row(0).iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if trace > 1e-10 {
        return Err(Error::Precondition(format!(
            "boundary trace {trace:e} is not zero; the odd extension would be discontinuous"
        )));
    }
    let (ns, m) = collar.shape();
    let values = Array2::from_shape_fn((2 * ns - 1, m), |(k, j)| {
        let c = ns - 1;
        if k > c {
            v[[k - c, j]]
        } else if k < c {
            -v[[c - k, j]]
        } else {
            0.0
        }
    });
    Ok(OddExtension { collar, values })
}

impl OddExtension {
    pub fn collar(&self) -> &Arc<CollarGrid> {
        &self.collar
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn s(&self, k: usize) -> f64 {
        (k as f64 - (self.collar.n_s() - 1) as f64) * self.collar.h_s()
    }

    /// Value at `(s, θ)` by cubic interpolation; zero beyond `|s| > depth`.
    pub fn at(&self, s: f64, theta: f64) -> f64 {
        let c = &self.collar;
        if s.abs() > c.depth() * (1.0 + 1e-12) {
            return 0.0;
        }
        let rows = self.values.nrows();
        let x = s / c.h_s() + (c.n_s() - 1) as f64;
        let i0 = (x.floor() as i64 - 1).clamp(0, rows as i64 - 4) as usize;
        let wi = cubic_weights(x - i0 as f64);
        let nt = c.n_theta() as i64;
        let y = theta / c.h_theta();
        let j0 = y.floor() as i64 - 1;
        let wj = cubic_weights(y - j0 as f64);
        let mut acc = 0.0;
        for (a, wa) in wi.iter().enumerate() {
            let row = self.values.row(i0 + a);
            let mut r = 0.0;
            for (b, wb) in wj.iter().enumerate() {
                r += wb * row[(j0 + b as i64).rem_euclid(nt) as usize];
            }
            acc += wa * r;
        }
        acc
    }
}

/// `ρ_η ∗ ψ̃` in `(s, θ)` at the collar nodes `s ≥ 0`.
pub fn mollify_collar(ext: &OddExtension, kernel: &MollifierKernel) -> Result<GridField> {
    let c = ext.collar().clone();
    let (ns, nt) = c.shape();
    let vals: Vec<f64> = (0..ns * nt)
        .into_par_iter()
        .map(|k| {
            let (s, t) = (c.s(k / nt), c.theta(k % nt));
            kernel.taps().iter().map(|(o, w)| w * ext.at(s + o[0], t + o[1])).sum()
        })
        .collect();
    let out = Array2::from_shape_vec((ns, nt), vals).expect("collar shape");
    GridField::scalar(Chart::Collar(c), out)
}

/// Euclidean `ρ_η ∗ f` at the interior nodes for `f` vanishing near the wall;
/// nodes shallower than `skip_depth` are set to zero.
pub fn mollify_interior(f: &GridField, kernel: &MollifierKernel, skip_depth: f64) -> Result<GridField> {
    let g = f.chart().interior()?.clone();
    let m = g.n_phi();
    let depth = node_depths(&g);
    let sampler = InteriorSampler::new(&g);
    let table = f.comp(0);
    let vals: Vec<f64> = (0..g.n_rho() * m)
        .into_par_iter()
        .map(|k| {
            if depth[k] < skip_depth {
                return 0.0;
            }
            let x = g.node(k / m, k % m).x;
            kernel
                .taps()
                .iter()
                .map(|(o, w)| sampler.at(table, [x[0] + o[0], x[1] + o[1]]).map_or(0.0, |v| w * v))
                .sum()
        })
        .collect();
    let out = Array2::from_shape_vec(g.shape(), vals).expect("grid shape");
    GridField::scalar(Chart::Interior(g), out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub kernel: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifyDiagnostics {
    /// `max |ψ_b^η(0, θ)|` before the wall row is pinned.
    pub trace_residual: f64,
    pub divergence_max: f64,
    pub normal_max: f64,
    /// `‖∇⊥ψ − u‖_∞` of the stream recovery.
    pub round_trip: f64,
}

#[derive(Clone, Debug)]
pub struct RegularizedVelocity {
    pub u_eta: GridField,
    pub psi_eta: StreamFunction,
    pub eta: f64,
    pub provenance: Provenance,
    pub diagnostics: MollifyDiagnostics,
}

/// Boundary collar used by the mollifier: aligned with the interior grid and
/// deep enough for `δ + η`.
pub fn mollifier_collar(grid: &InteriorGrid, cutoffs: &CutoffProfile, eta: f64) -> Result<Arc<CollarGrid>> {
    let chart = grid.domain().chart().delta();
    let need = cutoffs.delta + eta;
    let want = (need + 3.0 * grid.radial_spacing()).min(chart);
    let collar = CollarGrid::aligned(grid, want)?;
    if collar.depth() < need * (1.0 - 1e-12) {
        return Err(Error::Config(format!(
            "collar depth {} cannot hold δ + η = {need} inside the chart depth {chart}",
            collar.depth()
        )));
    }
    Ok(collar)
}

pub fn mollify_velocity(u: &GridField, eta: f64, cutoffs: &CutoffProfile) -> Result<RegularizedVelocity> {
    let g = u.chart().interior()?.clone();
    cutoffs.validate()?;
    EtaWindow::new(&g, cutoffs).check(eta)?;
    let rec = recover_stream(u)?;
    mollify_stream(&rec.psi, eta, cutoffs, rec.round_trip, "velocity")
}

/// The pipeline from an already recovered stream function.
pub fn mollify_stream(psi: &StreamFunction, eta: f64, cutoffs: &CutoffProfile, round_trip: f64, source: &str) -> Result<RegularizedVelocity> {
    let g = psi.grid().clone();
    EtaWindow::new(&g, cutoffs).check(eta)?;
    let kernel = MollifierKernel::new(eta)?;
    let collar = mollifier_collar(&g, cutoffs, eta)?;
    let split = split_stream(psi, cutoffs, &collar)?;
    let ext = odd_extend(&split.boundary)?;
    let b_eta = mollify_collar(&ext, &kernel)?;
    let trace_residual = b_eta.comp(0).row(0).iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let i_eta = mollify_interior(&split.interior, &kernel, cutoffs.delta - cutoffs.epsilon - 1.5 * eta)?;
    let b_nodes = resample_to_interior(&b_eta, &g, 0.0)?;
    let total = i_eta.add(&b_nodes)?;
    let psi_eta = StreamFunction::new(total, 1e-10)?;
    let u_eta = stream_to_velocity(&psi_eta);
    let divergence_max = divergence(&u_eta)?.sup_norm();
    let normal_max = wall_normal_max(&u_eta)?;
    Ok(RegularizedVelocity {
        u_eta,
        psi_eta,
        eta,
        provenance: Provenance {
            source: source.to_string(),
            kernel: kernel.id(),
        },
        diagnostics: MollifyDiagnostics {
            trace_residual,
            divergence_max,
            normal_max,
            round_trip,
        },
    })
}
