use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `C^∞` transition from 0 (t ≤ 0) to 1 (t ≥ 1) built on `exp(-1/t)`.
pub fn smoothstep(t: f64) -> f64 {
    smoothstep_derivs(t).0
}

/// Smoothstep value with its first two derivatives.
pub fn smoothstep_derivs(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    // S = 1 / (1 + exp(1/t - 1/(1-t)))
    let z = 1.0 / t - 1.0 / (1.0 - t);
    let s = if z > 700.0 {
        0.0
    } else if z < -700.0 {
        1.0
    } else {
        1.0 / (1.0 + z.exp())
    };
    let g = 1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t));
    let dg = -2.0 / (t * t * t) + 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
    let s1 = s * (1.0 - s) * g;
    let s2 = s1 * (1.0 - 2.0 * s) * g + s * (1.0 - s) * dg;
    (s, s1, s2)
}

/// The three cutoff profiles of the collar decomposition.
///
/// `φ` cuts off the collar, `φ_b` localizes near the wall and `φ_i` away from
/// it; every depth has at least one profile equal to one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub delta: f64,
    pub epsilon: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl CutoffProfile {
    pub fn new(delta: f64, epsilon: f64, delta1: f64, delta2: f64, delta3: f64) -> Result<Self> {
        let c = CutoffProfile {
            delta,
            epsilon,
            delta1,
            delta2,
            delta3,
        };
        c.validate()?;
        Ok(c)
    }

    /// Parameters at fractions `(0.125, 0.25, 0.5, 0.625)` of `δ` for `(ε, δ₁, δ₂, δ₃)`.
    pub fn with_default_fractions(delta: f64) -> Result<Self> {
        Self::new(delta, 0.125 * delta, 0.25 * delta, 0.5 * delta, 0.625 * delta)
    }

    pub fn validate(&self) -> Result<()> {
        let CutoffProfile {
            delta: d,
            epsilon: e,
            delta1: d1,
            delta2: d2,
            delta3: d3,
        } = *self;
        if ![d, e, d1, d2, d3].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("cutoff parameters must be finite".into()));
        }
        let checks = [
            (e > 0.0, "0 < ε"),
            (0.0 < d1, "0 < δ₁"),
            (d1 < d2 - e, "δ₁ < δ₂ − ε"),
            (d2 - e < d3, "δ₂ − ε < δ₃"),
            (d3 < d - 2.0 * e, "δ₃ < δ − 2ε"),
        ];
        for (ok, rel) in checks {
            if !ok {
                return Err(Error::Config(format!(
                    "cutoff chain violates {rel} (δ={d}, ε={e}, δ₁={d1}, δ₂={d2}, δ₃={d3})"
                )));
            }
        }
        Ok(())
    }

    /// `φ`: 1 on `[0, δ−ε]`, 0 on `[δ, ∞)`.
    pub fn phi(&self, s: f64) -> f64 {
        1.0 - smoothstep((s - (self.delta - self.epsilon)) / self.epsilon)
    }

    fn b_range(&self) -> (f64, f64) {
        let lo = self.delta3 + self.epsilon;
        (lo, self.delta - self.epsilon - lo)
    }

    /// `φ_b`: 1 on `[0, δ₃+ε]`, 0 on `[δ−ε, ∞)`.
    pub fn phi_b(&self, s: f64) -> f64 {
        self.phi_b_derivs(s).0
    }

    /// `(φ_b, φ_b′, φ_b″)`.
    pub fn phi_b_derivs(&self, s: f64) -> (f64, f64, f64) {
        let (lo, w) = self.b_range();
        let (v, d1, d2) = smoothstep_derivs((s - lo) / w);
        (1.0 - v, -d1 / w, -d2 / (w * w))
    }

    /// `φ_i`: 0 on `[0, δ₁]`, 1 on `[δ₂−ε, ∞)`.
    pub fn phi_i(&self, s: f64) -> f64 {
        let w = self.delta2 - self.epsilon - self.delta1;
        smoothstep((s - self.delta1) / w)
    }
}
