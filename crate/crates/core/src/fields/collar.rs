//! Differential operators in geodesic coordinates `(s, θ)`.

use ndarray::Array2;

use super::field::{Chart, GridField};
use super::grid::CollarGrid;
use super::stencil::{d2_rows, d_cols, d_rows};
use crate::error::{Error, Result};

pub(crate) fn jacobian_table(g: &CollarGrid) -> Array2<f64> {
    Array2::from_shape_fn(g.shape(), |(i, j)| g.jacobian(i, j))
}

/// Frame components `(v·n, v·τ)` of a Cartesian vector field on the collar.
pub fn frame_components(v: &GridField) -> Result<(Array2<f64>, Array2<f64>)> {
    let g = v.chart().collar()?;
    if v.n_components() != 2 {
        return Err(Error::Shape("expected a vector field".into()));
    }
    let (v1, v2) = (v.comp(0), v.comp(1));
    let vn = Array2::from_shape_fn(g.shape(), |(i, j)| {
        let f = g.frame(j);
        v1[[i, j]] * f.n[0] + v2[[i, j]] * f.n[1]
    });
    let vt = Array2::from_shape_fn(g.shape(), |(i, j)| {
        let f = g.frame(j);
        v1[[i, j]] * f.tau[0] + v2[[i, j]] * f.tau[1]
    });
    Ok((vn, vt))
}

/// Cartesian field from frame components on the collar.
pub fn from_frame_components(g: &std::sync::Arc<CollarGrid>, vn: &Array2<f64>, vt: &Array2<f64>) -> Result<GridField> {
    let v1 = Array2::from_shape_fn(g.shape(), |(i, j)| {
        let f = g.frame(j);
        vn[[i, j]] * f.n[0] + vt[[i, j]] * f.tau[0]
    });
    let v2 = Array2::from_shape_fn(g.shape(), |(i, j)| {
        let f = g.frame(j);
        vn[[i, j]] * f.n[1] + vt[[i, j]] * f.tau[1]
    });
    GridField::new(Chart::Collar(g.clone()), vec![v1, v2])
}

/// `(1/J)(∂_s(J v·n) + ∂_θ(v·τ))`.
pub fn divergence_collar(v: &GridField) -> Result<GridField> {
    let g = v.chart().collar()?.clone();
    let (vn, vt) = frame_components(v)?;
    let j = jacobian_table(&g);
    let out = (d_rows(&(&j * &vn), g.h_s()) + d_cols(&vt, g.h_theta())) / &j;
    GridField::scalar(Chart::Collar(g), out)
}

/// `∂₁v₂ − ∂₂v₁ = (1/J)(∂_θ(v·n) − ∂_s(J v·τ))`; the `(s, θ)` frame is
/// clockwise, hence the orientation sign.
pub fn curl_collar(v: &GridField) -> Result<GridField> {
    let g = v.chart().collar()?.clone();
    let (vn, vt) = frame_components(v)?;
    let j = jacobian_table(&g);
    let out = (d_cols(&vn, g.h_theta()) - d_rows(&(&j * &vt), g.h_s())) / &j;
    GridField::scalar(Chart::Collar(g), out)
}

/// `(1/J)∂_s(J∂_s q) + (1/J)∂_θ((1/J)∂_θ q)` in conservative form, with
/// one-sided second-order closures on the first and last rows.
pub fn laplacian_collar(q: &GridField) -> Result<GridField> {
    let g = q.chart().collar()?.clone();
    if q.n_components() != 1 {
        return Err(Error::Shape("expected a scalar field".into()));
    }
    GridField::scalar(Chart::Collar(g.clone()), laplacian_table(&g, q.comp(0)))
}

pub(crate) fn laplacian_table(g: &CollarGrid, q: &Array2<f64>) -> Array2<f64> {
    let (ns, nt) = g.shape();
    let (hs, ht) = (g.h_s(), g.h_theta());
    let mut out = Array2::zeros((ns, nt));
    let qs = d_rows(q, hs);
    let qss = d2_rows(q, hs);
    for j in 0..nt {
        let gam = g.gamma(j);
        for i in 0..ns {
            let s = g.s(i);
            let jac = 1.0 + s * gam;
            out[[i, j]] = if i == 0 || i + 1 == ns {
                qss[[i, j]] + gam / jac * qs[[i, j]]
            } else {
                let jp = 1.0 + (s + 0.5 * hs) * gam;
                let jm = 1.0 + (s - 0.5 * hs) * gam;
                (jp * (q[[i + 1, j]] - q[[i, j]]) - jm * (q[[i, j]] - q[[i - 1, j]])) / (hs * hs * jac)
            };
        }
    }
    for i in 0..ns {
        let s = g.s(i);
        let inv = |j: usize| 1.0 / (1.0 + s * g.gamma(j));
        for j in 0..nt {
            let (jn, jp) = ((j + nt - 1) % nt, (j + 1) % nt);
            let cp = 0.5 * (inv(j) + inv(jp));
            let cm = 0.5 * (inv(j) + inv(jn));
            let flux = cp * (q[[i, jp]] - q[[i, j]]) - cm * (q[[i, j]] - q[[i, jn]]);
            out[[i, j]] += inv(j) * flux / (ht * ht);
        }
    }
    out
}
