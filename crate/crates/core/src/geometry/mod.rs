//! Boundary curves, geodesic collar coordinates and cutoff profiles.

mod chart;
mod curve;
mod cutoff;
mod preset;

use std::sync::Arc;

pub use chart::{CollarCoord, GeodesicChart};
pub use curve::{reach_estimate, BoundaryCurve, CurvePoint};
pub use cutoff::{smoothstep, smoothstep_derivs, CutoffProfile};
pub use preset::CurvePreset;

use crate::error::Result;

/// A star-shaped domain: its boundary curve, the collar chart at the estimated
/// reach, and the polar radius function used by the interior chart.
#[derive(Clone, Debug)]
pub struct Domain {
    chart: GeodesicChart,
    reach: f64,
}

impl Domain {
    /// `reach_margin` scales `1/max|γ|` in the reach estimate; the collar chart
    /// is built at the estimated reach.
    pub fn new(preset: CurvePreset, curve_nodes: usize, reach_margin: f64) -> Result<Arc<Self>> {
        let curve = BoundaryCurve::build(preset, curve_nodes)?;
        let reach = reach_estimate(&curve, reach_margin);
        let chart = GeodesicChart::new(curve, reach)?;
        Ok(Arc::new(Domain { chart, reach }))
    }

    pub fn unit_disk() -> Arc<Self> {
        Self::new(CurvePreset::unit_circle(), 512, 0.5).expect("unit circle is valid")
    }

    pub fn preset(&self) -> &CurvePreset {
        self.chart.curve().preset()
    }

    pub fn curve(&self) -> &BoundaryCurve {
        self.chart.curve()
    }

    pub fn chart(&self) -> &GeodesicChart {
        &self.chart
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Default cutoffs: `δ = reach/2` with the default fractions.
    pub fn default_cutoffs(&self) -> CutoffProfile {
        CutoffProfile::with_default_fractions(0.5 * self.reach).expect("default fractions satisfy the chain")
    }
}
