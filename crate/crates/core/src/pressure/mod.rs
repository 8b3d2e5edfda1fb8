//! Pressure recovery and the boundary-layer diagnostics built on it.

mod collar;
mod solve;
mod study;
mod trace;

pub use collar::{
    boundary_piece_on_collar, collar_flux_residual, sanss2_rhs, split_pb, BoundaryRhs, PbSplit, ProbeTerms, SDifference,
    StencilAudit,
};
pub use solve::{
    adjustment_term, bc_equivalence_check, solve_pressure, solve_pressure_with, solve_regularized, wall_neumann_data,
    wall_normal_derivative, PressureSolution,
};
pub use study::{eta_study, median, sweep_spread, EstimateLedger, EstimateRecord, FieldTag};
pub use trace::{boundary_trace, TraceCurve};
