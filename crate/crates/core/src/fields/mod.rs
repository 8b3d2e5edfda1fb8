//! Fields on the interior and collar charts, generators and differential
//! operators.

mod collar;
mod field;
mod generators;
mod grid;
mod interior;
mod interp;
pub mod io;
pub(crate) mod stencil;

pub use collar::{curl_collar, divergence_collar, frame_components, from_frame_components, laplacian_collar};
pub use field::{Chart, GridField, StreamFunction};
pub use generators::{make_rough_stream, radial_flow, sample_scalar, sample_vector, RadialProfile, RoughSpec};
pub use grid::{CollarGrid, InteriorGrid, NodeGeom};
pub use interior::{
    cartesian_gradient, curl, curvilinear_gradient, divergence, divergence_cartesian, hessian_rhs, momentum_flux, perp_gradient, rhs_double_divergence,
    stream_to_velocity,
};
pub use interp::{collar_at, cubic_weights, lagrange4, resample_to_collar, resample_to_interior, InteriorSampler};

use std::sync::Arc;

use crate::error::Result;

/// Frame components `(u·n, u·τ)` of an interior or collar vector field on `collar`.
pub fn collar_components(u: &GridField, collar: &Arc<CollarGrid>) -> Result<(GridField, GridField)> {
    let on_collar = match u.chart() {
        Chart::Collar(_) => u.clone(),
        Chart::Interior(_) => resample_to_collar(u, collar)?,
    };
    let (un, ut) = frame_components(&on_collar)?;
    let chart = on_collar.chart().clone();
    Ok((GridField::scalar(chart.clone(), un)?, GridField::scalar(chart, ut)?))
}
