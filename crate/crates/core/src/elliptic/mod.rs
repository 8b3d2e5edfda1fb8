//! Linear solvers: Neumann and Dirichlet Poisson problems on the interior
//! chart and the mixed problem on the collar.

mod fourier;
mod interior;
mod slab;
pub mod sparse;

pub use interior::{
    solve_dirichlet_stream, solve_neumann, solve_neumann_from, InteriorOperator, LinearSolveReport, PreconditionerKind,
    SolverSettings, WallCondition,
};
pub use slab::{green_kernel_image, solve_slab_mixed, SlabOperator};
