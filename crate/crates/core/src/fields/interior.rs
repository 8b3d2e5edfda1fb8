//! Differential operators on the interior chart through the chart metric.

use ndarray::Array2;

use super::field::{Chart, GridField, StreamFunction};
use super::grid::InteriorGrid;
use super::stencil::{d_cols, d_rows_pole};
use crate::error::{Error, Result};

/// `(∂_ρq, ∂_φq)` with second-order stencils; the first ring differences
/// through the pole (exact for centrally symmetric domains).
pub fn curvilinear_gradient(q: &Array2<f64>, g: &InteriorGrid) -> (Array2<f64>, Array2<f64>) {
    (d_rows_pole(q, g.h()), d_cols(q, g.h_phi()))
}

fn scalar_of(f: &GridField) -> Result<&Array2<f64>> {
    if f.n_components() != 1 {
        return Err(Error::Shape("expected a scalar field".into()));
    }
    Ok(f.comp(0))
}

fn vector_of(f: &GridField) -> Result<(&Array2<f64>, &Array2<f64>)> {
    if f.n_components() != 2 {
        return Err(Error::Shape("expected a vector field".into()));
    }
    Ok((f.comp(0), f.comp(1)))
}

/// Cartesian gradient `M^{-T}(∂_ρq, ∂_φq)`.
pub fn cartesian_gradient(q: &GridField) -> Result<GridField> {
    let g = q.chart().interior()?.clone();
    let (dr, dp) = curvilinear_gradient(scalar_of(q)?, &g);
    let (mut gx, mut gy) = (dr.clone(), dp.clone());
    for (k, n) in g.nodes().iter().enumerate() {
        let (i, j) = (k / g.n_phi(), k % g.n_phi());
        let (a, c) = (n.d_rho[0], n.d_rho[1]);
        let (b, d) = (n.d_phi[0], n.d_phi[1]);
        let (qr, qp) = (dr[[i, j]], dp[[i, j]]);
        gx[[i, j]] = (d * qr - c * qp) / n.det;
        gy[[i, j]] = (-b * qr + a * qp) / n.det;
    }
    GridField::new(Chart::Interior(g), vec![gx, gy])
}

/// `∇⊥q = (−∂₂q, ∂₁q)` of any scalar field on the interior chart.
pub fn perp_gradient(q: &GridField) -> Result<GridField> {
    let grad = cartesian_gradient(q)?;
    let mut comps = grad.into_comps();
    let gy = comps.pop().unwrap();
    let gx = comps.pop().unwrap();
    GridField::new(q.chart().clone(), vec![-gy, gx])
}

/// Velocity `u = ∇⊥ψ` of a stream function.
pub fn stream_to_velocity(psi: &StreamFunction) -> GridField {
    perp_gradient(psi.field()).expect("stream functions are scalar interior fields")
}

/// `(1/√g)[D_ρ(√g v^ρ) + D_φ(√g v^φ)]` with contravariant components `M^{-1}v`.
pub fn divergence(v: &GridField) -> Result<GridField> {
    let g = v.chart().interior()?.clone();
    let (v1, v2) = vector_of(v)?;
    let shape = g.shape();
    let mut fr = Array2::zeros(shape);
    let mut fp = Array2::zeros(shape);
    for (k, n) in g.nodes().iter().enumerate() {
        let (i, j) = (k / g.n_phi(), k % g.n_phi());
        let (a, c) = (n.d_rho[0], n.d_rho[1]);
        let (b, d) = (n.d_phi[0], n.d_phi[1]);
        let (x, y) = (v1[[i, j]], v2[[i, j]]);
        fr[[i, j]] = d * x - b * y;
        fp[[i, j]] = -c * x + a * y;
    }
    let mut out = d_rows_pole(&fr, g.h()) + d_cols(&fp, g.h_phi());
    for (k, n) in g.nodes().iter().enumerate() {
        out[[k / g.n_phi(), k % g.n_phi()]] /= n.det;
    }
    GridField::scalar(Chart::Interior(g), out)
}

/// `∂₁v₂ − ∂₂v₁`, as the divergence of `(v₂, −v₁)`.
pub fn curl(v: &GridField) -> Result<GridField> {
    let (v1, v2) = vector_of(v)?;
    let rot = GridField::new(v.chart().clone(), vec![v2.clone(), -v1])?;
    divergence(&rot)
}

/// `∂₁v₁ + ∂₂v₂` from Cartesian gradients of the components. Unlike
/// [`divergence`] it is second order through the pole ring.
pub fn divergence_cartesian(v: &GridField) -> Result<GridField> {
    let (v1, v2) = vector_of(v)?;
    let chart = v.chart().clone();
    let g1 = cartesian_gradient(&GridField::scalar(chart.clone(), v1.clone())?)?;
    let g2 = cartesian_gradient(&GridField::scalar(chart.clone(), v2.clone())?)?;
    GridField::scalar(chart, g1.comp(0) + g2.comp(1))
}

/// `div(u⊗u)`, row `i` being `∂ⱼ(uᵢuⱼ)`, from Cartesian differences of the
/// sampled tensor.
pub fn momentum_flux(u: &GridField) -> Result<GridField> {
    let (u1, u2) = vector_of(u)?;
    let chart = u.chart().clone();
    let w1 = divergence_cartesian(&GridField::new(chart.clone(), vec![u1 * u1, u2 * u1])?)?;
    let w2 = divergence_cartesian(&GridField::new(chart.clone(), vec![u1 * u2, u2 * u2])?)?;
    GridField::new(chart, vec![w1.comp(0).clone(), w2.comp(0).clone()])
}

/// `∇⊗∇ : (u⊗u) = Σ ∂ᵢ∂ⱼ(uᵢuⱼ)` as two successive discrete divergences of the
/// sampled tensor.
pub fn rhs_double_divergence(u: &GridField) -> Result<GridField> {
    divergence_cartesian(&momentum_flux(u)?)
}

/// `2(ψ₁₂² − ψ₁₁ψ₂₂)` from repeated Cartesian gradients.
pub fn hessian_rhs(psi: &GridField) -> Result<GridField> {
    let grad = cartesian_gradient(psi)?;
    let chart = psi.chart().clone();
    let g1 = cartesian_gradient(&GridField::scalar(chart.clone(), grad.comp(0).clone())?)?;
    let g2 = cartesian_gradient(&GridField::scalar(chart.clone(), grad.comp(1).clone())?)?;
    let p11 = g1.comp(0);
    let p12 = (g1.comp(1) + g2.comp(0)) * 0.5;
    let p22 = g2.comp(1);
    let out = (&p12 * &p12 - p11 * p22) * 2.0;
    GridField::scalar(chart, out)
}
