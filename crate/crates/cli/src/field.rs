use std::sync::Arc;

use pressure_lab::fields::{
    make_rough_stream, radial_flow, sample_scalar, sample_vector, stream_to_velocity, GridField, InteriorGrid,
    RadialProfile, RoughSpec, StreamFunction,
};

use crate::config::FieldSpec;
use crate::error::CliResult;

/// `ψ = (1 − ρ²) sin(k·x)`, which vanishes on the wall of any chart.
pub fn smooth_field(grid: &Arc<InteriorGrid>, wave: [f64; 2]) -> CliResult<GridField> {
    let psi = sample_scalar(grid, |x| {
        let rho = grid.polar(x).0;
        (1.0 - rho * rho) * (wave[0] * x[0] + wave[1] * x[1]).sin()
    });
    Ok(stream_to_velocity(&StreamFunction::new(psi, 1e-10)?))
}

pub fn rough_field(grid: &Arc<InteriorGrid>, alpha: f64, seed: u64, j_max: u32) -> CliResult<GridField> {
    let spec = RoughSpec { alpha, seed, j_max };
    Ok(stream_to_velocity(&make_rough_stream(grid, &spec)?))
}

/// The velocity of `spec`, with the resolved scale count for rough fields.
pub fn build(grid: &Arc<InteriorGrid>, spec: &FieldSpec, j_max: u32) -> CliResult<GridField> {
    Ok(match spec {
        FieldSpec::Zero => radial_flow(grid, RadialProfile::Zero)?,
        FieldSpec::Rigid => sample_vector(grid, |x| [-x[1], x[0]]),
        FieldSpec::Radial { power } => radial_flow(grid, RadialProfile::Power { k: *power })?,
        FieldSpec::Smooth { wave } => smooth_field(grid, *wave)?,
        FieldSpec::Rough { alpha, seed, .. } => rough_field(grid, *alpha, *seed, j_max)?,
    })
}

/// Exact pressure up to a constant for the radial families, `p′ = V²/r`.
pub fn oracle(spec: &FieldSpec) -> Option<Box<dyn Fn([f64; 2]) -> f64>> {
    let k = match spec {
        FieldSpec::Zero => return Some(Box::new(|_| 0.0)),
        FieldSpec::Rigid => 1,
        FieldSpec::Radial { power } => *power as i32,
        _ => return None,
    };
    Some(Box::new(move |x| (x[0] * x[0] + x[1] * x[1]).powi(k) / (2 * k) as f64))
}
