use super::curve::{BoundaryCurve, CurvePoint};
use super::preset::V2;
use crate::error::{Error, Result};

/// Geodesic collar coordinates `X(s, θ) = x(θ) + s n(θ)` for `0 ≤ s ≤ δ`.
#[derive(Clone, Debug)]
pub struct GeodesicChart {
    curve: BoundaryCurve,
    delta: f64,
}

/// Collar coordinates of a point together with the frame of its foot point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollarCoord {
    pub s: f64,
    pub foot: CurvePoint,
}

impl GeodesicChart {
    pub fn new(curve: BoundaryCurve, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!("collar depth must be positive, got {delta}")));
        }
        let jmin = curve
            .nodes()
            .iter()
            .map(|p| 1.0 + delta * p.gamma.min(0.0))
            .fold(f64::INFINITY, f64::min);
        if jmin <= 0.0 {
            return Err(Error::Config(format!(
                "collar depth {delta} makes J = 1 + sγ vanish (min {jmin:.3e})"
            )));
        }
        Ok(GeodesicChart { curve, delta })
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn jacobian(&self, s: f64, theta: f64) -> f64 {
        1.0 + s * self.curve.curvature(theta)
    }

    pub fn forward(&self, s: f64, theta: f64) -> Result<V2> {
        if !(s.abs() <= self.delta) {
            return Err(Error::Range {
                what: "s",
                value: s,
                lo: -self.delta,
                hi: self.delta,
            });
        }
        let p = self.curve.point_at(theta)?;
        Ok([p.x[0] + s * p.n[0], p.x[1] + s * p.n[1]])
    }

    /// Max of `||∂_θX| − J|` over `n_s` depths and the curve nodes, with
    /// `∂_θX = x′ + s n′` from the interpolated node table.
    pub fn metric_residual(&self, n_s: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for p in self.curve.nodes() {
            let [_, d1, d2] = self.curve.interpolated(p.theta);
            let g = self.curve.curvature(p.theta);
            for i in 0..n_s {
                let s = self.delta * i as f64 / (n_s - 1).max(1) as f64;
                let dx = [d1[0] - s * d2[1], d1[1] + s * d2[0]];
                worst = worst.max((dx[0].hypot(dx[1]) - (1.0 + s * g)).abs());
            }
        }
        worst
    }

    /// Inverse of [`forward`](Self::forward) for points of `Ω` within depth `δ`.
    pub fn closest_point(&self, x: V2) -> Result<(f64, f64)> {
        self.locate(x).map(|c| (c.s, c.foot.theta))
    }

    pub fn locate(&self, x: V2) -> Result<CollarCoord> {
        let nodes = self.curve.nodes();
        let (k, d2) = nodes
            .iter()
            .enumerate()
            .map(|(k, p)| (k, (x[0] - p.x[0]).powi(2) + (x[1] - p.x[1]).powi(2)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let spacing = self.curve.length() / nodes.len() as f64;
        if d2.sqrt() > self.delta + 2.0 * spacing {
            return Err(Error::OutOfCollar { depth: d2.sqrt() });
        }
        let preset = self.curve.preset();
        let mut t = nodes[k].t;
        let max_step = 4.0 * std::f64::consts::TAU / nodes.len() as f64;
        let scale = 1.0f64.max(x[0].hypot(x[1]));
        let mut trace = vec![t];
        for _ in 0..50 {
            let (c, d1, d2) = preset.eval(t);
            let r = [x[0] - c[0], x[1] - c[1]];
            let f = r[0] * d1[0] + r[1] * d1[1];
            let fp = r[0] * d2[0] + r[1] * d2[1] - (d1[0] * d1[0] + d1[1] * d1[1]);
            let step = (f / fp).clamp(-max_step, max_step);
            t -= step;
            trace.push(t);
            if step.abs() < 1e-15 * scale.max(1.0) || (f.abs() < 1e-13 * scale && step.abs() < 1e-12) {
                break;
            }
        }
        let foot = self.curve.point_at_param(t);
        let r = [x[0] - foot.x[0], x[1] - foot.x[1]];
        let tangential = r[0] * foot.tau[0] + r[1] * foot.tau[1];
        if tangential.abs() > 1e-10 * scale {
            return Err(Error::ClosestPoint { trace });
        }
        let s = r[0] * foot.n[0] + r[1] * foot.n[1];
        if s < -1e-12 * scale || s > self.delta {
            return Err(Error::OutOfCollar { depth: s });
        }
        Ok(CollarCoord { s: s.max(0.0), foot })
    }
}
