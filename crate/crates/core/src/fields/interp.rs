//! Tensor-product cubic Lagrange ("bicubic") transfer between charts.

use std::sync::Arc;

use ndarray::Array2;

use super::field::{Chart, GridField};
use super::grid::{CollarGrid, InteriorGrid};
use crate::error::{Error, Result};

/// Weights of the cubic Lagrange interpolant on nodes `{0,1,2,3}` at `t`.
#[inline]
pub fn cubic_weights(t: f64) -> [f64; 4] {
    let (a, b, c, d) = (t, t - 1.0, t - 2.0, t - 3.0);
    [
        -b * c * d / 6.0,
        a * c * d / 2.0,
        -a * b * d / 2.0,
        a * b * c / 6.0,
    ]
}

/// First node and weights of a clamped four-point window at fractional index `x`.
#[inline]
fn clamped_window(x: f64, n: usize) -> (usize, [f64; 4]) {
    let i0 = (x.floor() as i64 - 1).clamp(0, n as i64 - 4) as usize;
    (i0, cubic_weights(x - i0 as f64))
}

#[inline]
fn periodic_window(x: f64, _n: usize) -> (i64, [f64; 4]) {
    let base = x.floor() as i64 - 1;
    (base, cubic_weights(x - base as f64))
}

/// Interpolation of interior-chart tables at arbitrary points. Rows on the
/// far side of the pole are taken from the ring at `φ + π`.
pub struct InteriorSampler<'a> {
    grid: &'a InteriorGrid,
}

impl<'a> InteriorSampler<'a> {
    pub fn new(grid: &'a InteriorGrid) -> Self {
        InteriorSampler { grid }
    }

    /// Value of `table` at polar chart coordinates `(ρ, φ)`.
    pub fn at_polar(&self, table: &Array2<f64>, rho: f64, phi: f64) -> f64 {
        let g = self.grid;
        let (nr, np) = g.shape();
        let fi = rho / g.h() - 0.5;
        let fj = phi / g.h_phi();
        let (j0, wj) = periodic_window(fj, np);
        let half = np / 2;
        let mut rows = [(0usize, 0usize, 0.0f64); 4];
        if fi < 1.0 {
            // window {-2,-1,0,1}: reflected rings through the pole
            let base = -2i64;
            let w = cubic_weights(fi - base as f64);
            for (k, wk) in w.iter().enumerate() {
                let r = base + k as i64;
                rows[k] = if r < 0 {
                    ((-r - 1) as usize, half, *wk)
                } else {
                    (r as usize, 0, *wk)
                };
            }
        } else {
            let (i0, _) = clamped_window(fi, nr);
            let nodes: [f64; 4] = std::array::from_fn(|k| g.rho(i0 + k));
            let w = lagrange4(&nodes, rho);
            for k in 0..4 {
                rows[k] = (i0 + k, 0, w[k]);
            }
        }
        let mut acc = 0.0;
        for &(r, shift, wr) in &rows {
            if wr == 0.0 {
                continue;
            }
            let row = table.row(r);
            let mut s = 0.0;
            for (k, wk) in wj.iter().enumerate() {
                let j = (j0 + k as i64 + shift as i64).rem_euclid(np as i64) as usize;
                s += wk * row[j];
            }
            acc += wr * s;
        }
        acc
    }

    /// Value at a Cartesian point; `None` outside the chart (`ρ > 1`).
    pub fn at(&self, table: &Array2<f64>, x: [f64; 2]) -> Option<f64> {
        let (rho, phi) = self.grid.polar(x);
        if rho > 1.0 + 1e-12 {
            return None;
        }
        Some(self.at_polar(table, rho.min(1.0), phi))
    }
}

/// Lagrange weights on four arbitrary distinct nodes.
#[inline]
pub fn lagrange4(x: &[f64; 4], t: f64) -> [f64; 4] {
    std::array::from_fn(|k| {
        let mut w = 1.0;
        for m in 0..4 {
            if m != k {
                w *= (t - x[m]) / (x[k] - x[m]);
            }
        }
        w
    })
}

/// Value of a collar table at `(s, θ)`.
pub fn collar_at(g: &CollarGrid, table: &Array2<f64>, s: f64, theta: f64) -> f64 {
    let (ns, nt) = g.shape();
    let (i0, wi) = clamped_window(s / g.h_s(), ns);
    let (j0, wj) = periodic_window(theta / g.h_theta(), nt);
    let mut acc = 0.0;
    for (a, wa) in wi.iter().enumerate() {
        let row = table.row(i0 + a);
        let mut r = 0.0;
        for (b, wb) in wj.iter().enumerate() {
            r += wb * row[(j0 + b as i64).rem_euclid(nt as i64) as usize];
        }
        acc += wa * r;
    }
    acc
}

/// Resamples an interior-chart field onto the collar grid nodes.
pub fn resample_to_collar(f: &GridField, collar: &Arc<CollarGrid>) -> Result<GridField> {
    let g = f.chart().interior()?;
    if collar.is_flat() {
        return Err(Error::Shape("cannot resample onto a flat test chart".into()));
    }
    let sampler = InteriorSampler::new(g);
    let (ns, nt) = collar.shape();
    let comps = f
        .comps()
        .iter()
        .map(|c| {
            Array2::from_shape_fn((ns, nt), |(i, j)| {
                let x = collar.position(i, j);
                let (rho, phi) = g.polar(x);
                sampler.at_polar(c, rho.min(1.0), phi)
            })
        })
        .collect();
    GridField::new(Chart::Collar(collar.clone()), comps)
}

/// Resamples a collar field onto interior nodes inside the collar; other
/// nodes get `outside`.
pub fn resample_to_interior(f: &GridField, grid: &Arc<InteriorGrid>, outside: f64) -> Result<GridField> {
    let collar = f.chart().collar()?;
    let coords = grid.collar_coords();
    let comps = f
        .comps()
        .iter()
        .map(|c| {
            Array2::from_shape_fn(grid.shape(), |(i, j)| match coords[i * grid.n_phi() + j] {
                Some(cc) if cc.s <= collar.depth() => collar_at(collar, c, cc.s, cc.foot.theta),
                _ => outside,
            })
        })
        .collect();
    GridField::new(Chart::Interior(grid.clone()), comps)
}
