//! Trigonometric interpolation of periodic samples.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward DFT of real samples, scaled by `1/N`.
pub fn dft_scaled(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= s);
    buf
}

/// Signed wavenumber index of DFT bin `k` (Nyquist reported as `+N/2`).
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Trigonometric interpolant of `N` uniform samples over one period.
#[derive(Clone, Debug)]
pub struct TrigInterpolant {
    coeffs: Vec<Complex64>,
    period: f64,
}

impl TrigInterpolant {
    pub fn new(values: &[f64], period: f64) -> Self {
        TrigInterpolant {
            coeffs: dft_scaled(values),
            period,
        }
    }

    /// Value of the `order`-th derivative at `theta`.
    pub fn eval(&self, theta: f64, order: u32) -> f64 {
        let n = self.coeffs.len();
        let w0 = TAU / self.period;
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let m = signed_index(k, n);
            let w = w0 * m as f64;
            let e = Complex64::from_polar(1.0, w * theta);
            if n.is_multiple_of(2) && k == n / 2 {
                // split the Nyquist bin evenly between ±N/2
                let d = c.re * nyquist_derivative(w, theta, order);
                acc += d;
                continue;
            }
            let f = Complex64::new(0.0, w).powu(order);
            acc += (c * f * e).re;
        }
        acc
    }
}

fn nyquist_derivative(w: f64, theta: f64, order: u32) -> f64 {
    let x = w * theta;
    let p = w.powi(order as i32);
    match order % 4 {
        0 => p * x.cos(),
        1 => -p * x.sin(),
        2 => -p * x.cos(),
        _ => p * x.sin(),
    }
}

/// Spectral derivative of uniform periodic samples.
pub fn spectral_derivative(values: &[f64], period: f64, order: u32) -> Vec<f64> {
    let n = values.len();
    let mut c = dft_scaled(values);
    let w0 = TAU / period;
    for (k, ck) in c.iter_mut().enumerate() {
        let m = signed_index(k, n);
        if n.is_multiple_of(2) && k == n / 2 && order % 2 == 1 {
            *ck = Complex64::new(0.0, 0.0);
            continue;
        }
        *ck *= Complex64::new(0.0, w0 * m as f64).powu(order);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut c);
    c.iter().map(|v| v.re).collect()
}
