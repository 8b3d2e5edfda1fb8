use serde::{Deserialize, Serialize};

use super::solve::PressureSolution;
use crate::error::{Error, Result};
use crate::fields::{collar_components, resample_to_collar, CollarGrid, GridField};
use crate::norms::h_minus2_norm;

/// `H⁻²` distances of `∂_sP(s, ·)` to the wall data `γ(u·τ)²(0, ·)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceCurve {
    pub s: Vec<f64>,
    pub distance: Vec<f64>,
    /// Distance of the three-point one-sided `∂_sP(0, ·)`.
    pub wall_one_sided: f64,
    /// Distance of `2∂_sP(h) − ∂_sP(2h)`.
    pub wall_extrapolated: f64,
    /// Least-squares slope of the distance against `−s`; negative when the
    /// distance shrinks towards the wall.
    pub slope: f64,
}

fn lsq_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Samples `s = h, 2h, …` up to `s_max` on the grid-aligned collar.
pub fn boundary_trace(sol: &PressureSolution, u: &GridField, s_max: f64) -> Result<TraceCurve> {
    let grid = u.chart().interior()?;
    let depth = (s_max + 3.0 * grid.radial_spacing()).min(grid.domain().chart().delta());
    let collar = CollarGrid::aligned(grid, depth)?;
    let p = resample_to_collar(&sol.big_p, &collar)?;
    let p = p.comp(0);
    let (_, ut) = collar_components(u, &collar)?;
    let ut = ut.comp(0);
    let m = collar.n_theta();
    let hs = collar.h_s();
    let target: Vec<f64> = (0..m).map(|j| collar.gamma(j) * ut[[0, j]] * ut[[0, j]]).collect();
    let dist = |d: &[f64]| -> Result<f64> {
        let diff: Vec<f64> = d.iter().zip(&target).map(|(a, b)| a - b).collect();
        h_minus2_norm(&diff, collar.length())
    };
    let centered = |i: usize| -> Vec<f64> { (0..m).map(|j| (p[[i + 1, j]] - p[[i - 1, j]]) / (2.0 * hs)).collect() };
    let k_max = ((s_max / hs + 1e-9).floor() as usize).min(collar.n_s() - 2);
    if k_max < 2 {
        return Err(Error::Resolution(format!("trace window {s_max} holds fewer than two rows")));
    }
    let mut s = Vec::new();
    let mut distance = Vec::new();
    for k in 1..=k_max {
        s.push(k as f64 * hs);
        distance.push(dist(&centered(k))?);
    }
    let one_sided: Vec<f64> = (0..m).map(|j| (-3.0 * p[[0, j]] + 4.0 * p[[1, j]] - p[[2, j]]) / (2.0 * hs)).collect();
    let (d1, d2) = (centered(1), centered(2));
    let extrap: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| 2.0 * a - b).collect();
    let neg_s: Vec<f64> = s.iter().map(|v| -v).collect();
    Ok(TraceCurve {
        slope: lsq_slope(&neg_s, &distance),
        wall_one_sided: dist(&one_sided)?,
        wall_extrapolated: dist(&extrap)?,
        s,
        distance,
    })
}
