use std::f64::consts::TAU;
use std::sync::Arc;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{Chart, GridField, StreamFunction};
use super::grid::InteriorGrid;
use crate::error::{Error, Result};

/// Samples `f(x)` at the interior nodes.
pub fn sample_scalar(grid: &Arc<InteriorGrid>, f: impl Fn([f64; 2]) -> f64) -> GridField {
    let vals = Array2::from_shape_fn(grid.shape(), |(i, j)| f(grid.node(i, j).x));
    GridField::scalar(Chart::Interior(grid.clone()), vals).expect("shape from grid")
}

/// Samples a Cartesian vector field at the interior nodes.
pub fn sample_vector(grid: &Arc<InteriorGrid>, f: impl Fn([f64; 2]) -> [f64; 2]) -> GridField {
    let v: Vec<[f64; 2]> = grid.nodes().iter().map(|n| f(n.x)).collect();
    let (nr, np) = grid.shape();
    let c0 = Array2::from_shape_fn((nr, np), |(i, j)| v[i * np + j][0]);
    let c1 = Array2::from_shape_fn((nr, np), |(i, j)| v[i * np + j][1]);
    GridField::new(Chart::Interior(grid.clone()), vec![c0, c1]).expect("shape from grid")
}

/// Parameters of a lacunary rough stream function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughSpec {
    pub alpha: f64,
    pub seed: u64,
    pub j_max: u32,
}

impl RoughSpec {
    /// Largest scale count whose finest wavelength `2π/4^J` spans four cells.
    pub fn max_resolved_scales(grid: &InteriorGrid) -> u32 {
        let cell = grid.max_spacing();
        let mut j = 0;
        while TAU / 4f64.powi(j as i32 + 1) >= 4.0 * cell * (1.0 - 1e-9) {
            j += 1;
        }
        j
    }
}

/// `ψ = (1 − ρ²) Σ_{j ≤ J} 4^{−j(1+α)} sin(4^j k_j·x + φ_j)` with seeded unit
/// directions `k_j` and phases `φ_j`.
pub fn make_rough_stream(grid: &Arc<InteriorGrid>, spec: &RoughSpec) -> Result<StreamFunction> {
    if !(spec.alpha > 0.0 && spec.alpha < 1.0) {
        return Err(Error::Range {
            what: "alpha",
            value: spec.alpha,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let wavelength = TAU / 4f64.powi(spec.j_max as i32);
    let need = 4.0 * grid.max_spacing();
    if wavelength < need * (1.0 - 1e-9) {
        return Err(Error::Resolution(format!(
            "finest wavelength {wavelength:.4e} is under four cells ({need:.4e}); refine the grid or use j_max <= {}",
            RoughSpec::max_resolved_scales(grid)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let modes: Vec<(f64, [f64; 2], f64)> = (0..=spec.j_max)
        .map(|j| {
            let dir: f64 = rng.gen::<f64>() * TAU;
            let phase: f64 = rng.gen::<f64>() * TAU;
            let freq = 4f64.powi(j as i32);
            let amp = 4f64.powf(-(j as f64) * (1.0 + spec.alpha));
            (amp, [freq * dir.cos(), freq * dir.sin()], phase)
        })
        .collect();
    let vals = Array2::from_shape_fn(grid.shape(), |(i, j)| {
        let rho = grid.rho(i);
        let x = grid.node(i, j).x;
        let series: f64 = modes
            .iter()
            .map(|(a, k, p)| a * (k[0] * x[0] + k[1] * x[1] + p).sin())
            .sum();
        (1.0 - rho * rho) * series
    });
    StreamFunction::new(GridField::scalar(Chart::Interior(grid.clone()), vals)?, 1e-12)
}

/// Speed profiles `V(r)` of circular flows `u = V(r)(−x₂, x₁)/r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum RadialProfile {
    Zero,
    /// `V(r) = r^k` with `k ≥ 1`; `k = 1` is rigid rotation.
    Power { k: u32 },
}

impl RadialProfile {
    pub fn speed(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Power { k } => r.powi(*k as i32),
        }
    }

    /// `∫₀^r V²/σ dσ` minus its mean over the disk of radius `radius`.
    pub fn exact_pressure(&self, r: f64, radius: f64) -> f64 {
        match self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Power { k } => {
                let k = *k as f64;
                r.powf(2.0 * k) / (2.0 * k) - radius.powf(2.0 * k) / (2.0 * k * (k + 1.0))
            }
        }
    }
}

/// Samples a circular flow on a disk.
pub fn radial_flow(grid: &Arc<InteriorGrid>, profile: RadialProfile) -> Result<GridField> {
    if grid.domain().preset().circle_radius().is_none() {
        return Err(Error::Unsupported("radial flows need a disk domain".into()));
    }
    if let RadialProfile::Power { k: 0 } = profile {
        return Err(Error::Config("radial power profile needs k >= 1 so that V(0) = 0".into()));
    }
    Ok(sample_vector(grid, |x| {
        let r = x[0].hypot(x[1]);
        let v = profile.speed(r);
        if r == 0.0 {
            [0.0, 0.0]
        } else {
            [-v * x[1] / r, v * x[0] / r]
        }
    }))
}
