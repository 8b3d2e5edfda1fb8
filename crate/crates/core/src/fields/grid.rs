use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::{CollarCoord, CurvePoint, Domain};

/// Per-node geometry of the interior chart: position, Jacobian columns
/// `(∂_ρx, ∂_φx)` and determinant `√g = ρR²`.
#[derive(Clone, Copy, Debug)]
pub struct NodeGeom {
    pub x: [f64; 2],
    pub d_rho: [f64; 2],
    pub d_phi: [f64; 2],
    pub det: f64,
}

/// Polar chart `x = ρR(φ)(cos φ, sin φ)` of a star-shaped domain.
///
/// Radial nodes sit at `ρ_i = (i + ½)h` with `h = 1/(N_ρ − ½)`, so the last
/// row is the wall `ρ = 1` and there is no node at the pole.
#[derive(Debug)]
pub struct InteriorGrid {
    domain: Arc<Domain>,
    n_rho: usize,
    n_phi: usize,
    h: f64,
    h_phi: f64,
    radius: Vec<(f64, f64)>,
    nodes: Vec<NodeGeom>,
    wall: Vec<CurvePoint>,
    collar: OnceLock<Vec<Option<CollarCoord>>>,
}

impl InteriorGrid {
    pub fn new(domain: Arc<Domain>, n_rho: usize, n_phi: usize) -> Result<Arc<Self>> {
        if n_rho < 4 || n_phi < 8 || !n_phi.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "interior grid needs n_rho >= 4 and even n_phi >= 8, got {n_rho}x{n_phi}"
            )));
        }
        let h = 1.0 / (n_rho as f64 - 0.5);
        let h_phi = TAU / n_phi as f64;
        let preset = domain.preset().clone();
        let radius: Vec<(f64, f64)> = (0..n_phi).map(|j| preset.radius(j as f64 * h_phi)).collect();
        let mut nodes = Vec::with_capacity(n_rho * n_phi);
        for i in 0..n_rho {
            let rho = if i + 1 == n_rho { 1.0 } else { (i as f64 + 0.5) * h };
            for (j, &(r, dr)) in radius.iter().enumerate() {
                let (s, c) = (j as f64 * h_phi).sin_cos();
                nodes.push(NodeGeom {
                    x: [rho * r * c, rho * r * s],
                    d_rho: [r * c, r * s],
                    d_phi: [rho * (dr * c - r * s), rho * (dr * s + r * c)],
                    det: rho * r * r,
                });
            }
        }
        let wall = (0..n_phi)
            .map(|j| {
                let t = preset.param_of_polar(j as f64 * h_phi);
                domain.curve().point_at_param(t)
            })
            .collect();
        Ok(Arc::new(InteriorGrid {
            domain,
            n_rho,
            n_phi,
            h,
            h_phi,
            radius,
            nodes,
            wall,
            collar: OnceLock::new(),
        }))
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn n_rho(&self) -> usize {
        self.n_rho
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rho, self.n_phi)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn h_phi(&self) -> f64 {
        self.h_phi
    }

    pub fn rho(&self, i: usize) -> f64 {
        if i + 1 == self.n_rho {
            1.0
        } else {
            (i as f64 + 0.5) * self.h
        }
    }

    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * self.h_phi
    }

    /// `(R(φ_j), R′(φ_j))`.
    pub fn radius(&self, j: usize) -> (f64, f64) {
        self.radius[j]
    }

    pub fn node(&self, i: usize, j: usize) -> &NodeGeom {
        &self.nodes[i * self.n_phi + j]
    }

    pub fn nodes(&self) -> &[NodeGeom] {
        &self.nodes
    }

    /// Exact boundary frame at the wall node of column `j`.
    pub fn wall(&self, j: usize) -> &CurvePoint {
        &self.wall[j]
    }

    /// Physical radial spacing `h · max R`.
    pub fn radial_spacing(&self) -> f64 {
        self.h * self.radius.iter().map(|r| r.0).fold(0.0, f64::max)
    }

    /// Coarsest physical spacing over both directions.
    pub fn max_spacing(&self) -> f64 {
        let arc = self
            .radius
            .iter()
            .map(|&(r, dr)| r.hypot(dr))
            .fold(0.0, f64::max)
            * self.h_phi;
        self.radial_spacing().max(arc)
    }

    /// Collar coordinates of every node within the domain's collar chart.
    pub fn collar_coords(&self) -> &[Option<CollarCoord>] {
        self.collar.get_or_init(|| {
            let chart = self.domain.chart();
            let depth = chart.delta();
            let rmin = self.radius.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
            self.nodes
                .iter()
                .enumerate()
                .map(|(k, g)| {
                    let i = k / self.n_phi;
                    // every boundary point is at least (1 − ρ)·min R away from the node
                    let lower = (1.0 - self.rho(i)) * rmin * 0.5;
                    if lower > depth {
                        return None;
                    }
                    chart.locate(g.x).ok()
                })
                .collect()
        })
    }

    /// Polar chart coordinates `(ρ, φ)` of a point.
    pub fn polar(&self, x: [f64; 2]) -> (f64, f64) {
        let phi = x[1].atan2(x[0]).rem_euclid(TAU);
        let r = self.domain.preset().radius(phi).0;
        (x[0].hypot(x[1]) / r, phi)
    }
}

/// Uniform `(s, θ)` grid over a collar `[0, depth] × [0, L)`.
///
/// Rows are `s_i = i·h_s` for `i = 0..n_s` (so the last row is at `depth`) and
/// columns `θ_j = j·L/n_θ`. A flat chart has `γ ≡ 0` and embeds as `(θ, s)`.
#[derive(Debug)]
pub struct CollarGrid {
    length: f64,
    depth: f64,
    n_s: usize,
    n_theta: usize,
    frames: Vec<CurvePoint>,
    domain: Option<Arc<Domain>>,
}

impl CollarGrid {
    pub fn new(domain: Arc<Domain>, depth: f64, n_s: usize, n_theta: usize) -> Result<Arc<Self>> {
        Self::check(depth, n_s, n_theta)?;
        if depth > domain.chart().delta() * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "collar depth {depth} exceeds the chart depth {}",
                domain.chart().delta()
            )));
        }
        let length = domain.curve().length();
        let frames = (0..n_theta)
            .map(|j| domain.curve().point_at(j as f64 * length / n_theta as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(CollarGrid {
            length,
            depth,
            n_s,
            n_theta,
            frames,
            domain: Some(domain),
        }))
    }

    /// Straight test chart with `γ ≡ 0`.
    pub fn flat(length: f64, depth: f64, n_s: usize, n_theta: usize) -> Result<Arc<Self>> {
        Self::check(depth, n_s, n_theta)?;
        let ht = length / n_theta as f64;
        let frames = (0..n_theta)
            .map(|j| CurvePoint {
                t: j as f64 * ht,
                theta: j as f64 * ht,
                x: [j as f64 * ht, 0.0],
                tau: [1.0, 0.0],
                n: [0.0, 1.0],
                gamma: 0.0,
            })
            .collect();
        Ok(Arc::new(CollarGrid {
            length,
            depth,
            n_s,
            n_theta,
            frames,
            domain: None,
        }))
    }

    /// Collar grid whose nodes coincide with interior nodes when the domain is
    /// a circle (`h_s = R h`, `n_θ = n_φ`); otherwise a grid of comparable
    /// spacing. The depth is rounded down to a whole number of rows.
    pub fn aligned(grid: &InteriorGrid, depth: f64) -> Result<Arc<Self>> {
        let domain = grid.domain().clone();
        match domain.preset().circle_radius() {
            Some(r) => {
                let hs = r * grid.h();
                let n_s = (depth / hs + 1e-9).floor() as usize + 1;
                let depth = (n_s - 1) as f64 * hs;
                Self::check(depth, n_s, grid.n_phi())?;
                if depth > domain.chart().delta() * (1.0 + 1e-12) {
                    return Err(Error::Config(format!(
                        "collar depth {depth} exceeds the chart depth {}",
                        domain.chart().delta()
                    )));
                }
                let frames = (0..grid.n_phi()).map(|j| *grid.wall(j)).collect();
                Ok(Arc::new(CollarGrid {
                    length: domain.curve().length(),
                    depth,
                    n_s,
                    n_theta: grid.n_phi(),
                    frames,
                    domain: Some(domain),
                }))
            }
            None => {
                let n_s = (depth / grid.radial_spacing()).ceil() as usize + 1;
                Self::new(domain, depth, n_s.max(4), grid.n_phi())
            }
        }
    }

    fn check(depth: f64, n_s: usize, n_theta: usize) -> Result<()> {
        if n_s < 4 || n_theta < 8 || !(depth > 0.0) {
            return Err(Error::Config(format!(
                "collar grid needs n_s >= 4, n_theta >= 8 and positive depth, got {n_s}x{n_theta}, depth {depth}"
            )));
        }
        Ok(())
    }

    pub fn domain(&self) -> Option<&Arc<Domain>> {
        self.domain.as_ref()
    }

    pub fn is_flat(&self) -> bool {
        self.domain.is_none()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_s, self.n_theta)
    }

    pub fn h_s(&self) -> f64 {
        self.depth / (self.n_s - 1) as f64
    }

    pub fn h_theta(&self) -> f64 {
        self.length / self.n_theta as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        i as f64 * self.h_s()
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.h_theta()
    }

    pub fn frame(&self, j: usize) -> &CurvePoint {
        &self.frames[j]
    }

    pub fn gamma(&self, j: usize) -> f64 {
        self.frames[j].gamma
    }

    pub fn jacobian(&self, i: usize, j: usize) -> f64 {
        1.0 + self.s(i) * self.frames[j].gamma
    }

    pub fn position(&self, i: usize, j: usize) -> [f64; 2] {
        let f = &self.frames[j];
        let s = self.s(i);
        [f.x[0] + s * f.n[0], f.x[1] + s * f.n[1]]
    }
}
