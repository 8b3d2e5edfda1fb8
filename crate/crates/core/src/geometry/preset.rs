use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary curve families. Every preset is star-shaped about the origin and
/// traversed counterclockwise as its parameter `t` runs over `[0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum CurvePreset {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// `r(t) = r0 + Σ_k cos[k-1]·cos(k t) + sin[k-1]·sin(k t)`.
    Star {
        r0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

pub(crate) type V2 = [f64; 2];

impl CurvePreset {
    pub fn unit_circle() -> Self {
        CurvePreset::Circle { radius: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        match self {
            CurvePreset::Circle { radius } => {
                if !(finite(*radius) && *radius > 0.0) {
                    return Err(Error::Curve(format!("circle radius must be positive, got {radius}")));
                }
            }
            CurvePreset::Ellipse { a, b } => {
                if !(finite(*a) && finite(*b) && *a > 0.0 && *b > 0.0) {
                    return Err(Error::Curve(format!("ellipse semi-axes must be positive, got {a}, {b}")));
                }
            }
            CurvePreset::Star { r0, cos, sin } => {
                if !cos.iter().chain(sin.iter()).chain([r0]).all(|v| v.is_finite()) {
                    return Err(Error::Curve("star coefficients must be finite".into()));
                }
                let k = 4096;
                let rmin = (0..k)
                    .map(|i| self.radius(TAU * i as f64 / k as f64).0)
                    .fold(f64::INFINITY, f64::min);
                if rmin <= 1e-3 * r0.abs().max(1e-300) {
                    return Err(Error::Curve(format!(
                        "radius function reaches {rmin:.3e}; the polar graph is not a simple curve"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(r(t), r'(t), r''(t))` of a star preset.
    fn star_radius(r0: f64, cos: &[f64], sin: &[f64], t: f64) -> (f64, f64, f64) {
        let (mut r, mut r1, mut r2) = (r0, 0.0, 0.0);
        for k in 0..cos.len().max(sin.len()) {
            let a = cos.get(k).copied().unwrap_or(0.0);
            let b = sin.get(k).copied().unwrap_or(0.0);
            let kf = (k + 1) as f64;
            let (s, c) = (kf * t).sin_cos();
            r += a * c + b * s;
            r1 += kf * (-a * s + b * c);
            r2 -= kf * kf * (a * c + b * s);
        }
        (r, r1, r2)
    }

    /// Position and its first two parameter derivatives at `t`.
    pub fn eval(&self, t: f64) -> (V2, V2, V2) {
        let (s, c) = t.sin_cos();
        match self {
            CurvePreset::Circle { radius: r } => (
                [r * c, r * s],
                [-r * s, r * c],
                [-r * c, -r * s],
            ),
            CurvePreset::Ellipse { a, b } => (
                [a * c, b * s],
                [-a * s, b * c],
                [-a * c, -b * s],
            ),
            CurvePreset::Star { r0, cos, sin } => {
                let (r, r1, r2) = Self::star_radius(*r0, cos, sin, t);
                let er = [c, s];
                let ep = [-s, c];
                (
                    [r * c, r * s],
                    [r1 * er[0] + r * ep[0], r1 * er[1] + r * ep[1]],
                    [
                        (r2 - r) * er[0] + 2.0 * r1 * ep[0],
                        (r2 - r) * er[1] + 2.0 * r1 * ep[1],
                    ],
                )
            }
        }
    }

    /// Polar radius `R(φ)` of the boundary and `R'(φ)`.
    pub fn radius(&self, phi: f64) -> (f64, f64) {
        match self {
            CurvePreset::Circle { radius } => (*radius, 0.0),
            CurvePreset::Ellipse { a, b } => {
                let (s, c) = phi.sin_cos();
                let q = b * b * c * c + a * a * s * s;
                let r = a * b / q.sqrt();
                let dr = -a * b * (a * a - b * b) * s * c / (q * q.sqrt());
                (r, dr)
            }
            CurvePreset::Star { r0, cos, sin } => {
                let (r, r1, _) = Self::star_radius(*r0, cos, sin, phi);
                (r, r1)
            }
        }
    }

    /// Curve parameter of the boundary point at polar angle `φ`, in `[0, 2π)`.
    pub fn param_of_polar(&self, phi: f64) -> f64 {
        match self {
            CurvePreset::Ellipse { a, b } => {
                let (s, c) = phi.sin_cos();
                (a * s).atan2(b * c).rem_euclid(TAU)
            }
            _ => phi.rem_euclid(TAU),
        }
    }

    pub fn circle_radius(&self) -> Option<f64> {
        match self {
            CurvePreset::Circle { radius } => Some(*radius),
            _ => None,
        }
    }

    /// Largest polar radius, sampled.
    pub fn max_radius(&self) -> f64 {
        match self {
            CurvePreset::Circle { radius } => *radius,
            CurvePreset::Ellipse { a, b } => a.max(*b),
            CurvePreset::Star { .. } => (0..4096)
                .map(|i| self.radius(TAU * i as f64 / 4096.0).0)
                .fold(0.0, f64::max),
        }
    }
}
