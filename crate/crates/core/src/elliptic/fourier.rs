//! Row-Fourier preconditioner: the operator with its coefficients averaged
//! along each periodic row is diagonal in the column Fourier modes, leaving
//! one tridiagonal solve per mode.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::sparse::{thomas, Preconditioner};

pub struct RowFourier {
    rows: usize,
    cols: usize,
    /// Coupling between rows `i` and `i+1`.
    link: Vec<f64>,
    /// Extra diagonal per row (Dirichlet neighbours, zero otherwise).
    pin: Vec<f64>,
    /// Coupling between neighbouring columns in row `i`.
    ring: Vec<f64>,
    singular: bool,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl RowFourier {
    pub fn new(cols: usize, link: Vec<f64>, pin: Vec<f64>, ring: Vec<f64>, singular: bool) -> Self {
        let rows = ring.len();
        assert_eq!(link.len() + 1, rows);
        assert_eq!(pin.len(), rows);
        let mut planner = FftPlanner::new();
        RowFourier {
            rows,
            cols,
            link,
            pin,
            ring,
            singular,
            fwd: planner.plan_fft_forward(cols),
            inv: planner.plan_fft_inverse(cols),
        }
    }
}

impl Preconditioner for RowFourier {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let (n, m) = (self.rows, self.cols);
        let mut spec: Vec<Complex64> = r.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for row in spec.chunks_mut(m) {
            self.fwd.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        let mut diag = vec![0.0; n];
        let off: Vec<f64> = self.link.iter().map(|a| -a).collect();
        let mut work = Vec::new();
        for k in 0..m {
            for i in 0..n {
                col[i] = spec[i * m + k];
            }
            let sym = 2.0 - 2.0 * (TAU * k as f64 / m as f64).cos();
            if k == 0 && self.singular {
                // Path-graph Laplacian: integrate the cumulative flux.
                let mut acc = Complex64::new(0.0, 0.0);
                let mut u = Complex64::new(0.0, 0.0);
                let mut vals = vec![u; n];
                for i in 0..n - 1 {
                    acc += col[i];
                    u -= acc / self.link[i];
                    vals[i + 1] = u;
                }
                col.copy_from_slice(&vals);
            } else {
                for i in 0..n {
                    let lo = if i > 0 { self.link[i - 1] } else { 0.0 };
                    let hi = if i + 1 < n { self.link[i] } else { 0.0 };
                    diag[i] = lo + hi + self.pin[i] + self.ring[i] * sym;
                }
                thomas(&diag, &off, &mut col, &mut work);
            }
            for i in 0..n {
                spec[i * m + k] = col[i];
            }
        }
        for row in spec.chunks_mut(m) {
            self.inv.process(row);
        }
        let scale = 1.0 / m as f64;
        for (z, s) in z.iter_mut().zip(&spec) {
            *z = s.re * scale;
        }
    }
}
