//! Compressed-row matrices and preconditioned conjugate gradients.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *yr = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .find(|&k| self.cols[k] as usize == r)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        (self.row_ptr[r]..self.row_ptr[r + 1])
            .find(|&k| self.cols[k] as usize == c)
            .map_or(0.0, |k| self.vals[k])
    }

    /// Largest `|A_rc − A_cr|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k] as usize;
                worst = worst.max((self.vals[k] - self.get(c, r)).abs());
            }
        }
        worst
    }
}

/// Triplet accumulator for symmetric energy-form assembly.
#[derive(Debug, Default)]
pub struct Assembler {
    n: usize,
    trip: Vec<(u32, u32, f64)>,
}

impl Assembler {
    pub fn new(n: usize) -> Self {
        Assembler { n, trip: Vec::new() }
    }

    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        self.trip.push((r as u32, c as u32, v));
    }

    /// Adds `w (x_a − x_b)²` to the energy `xᵀAx`.
    pub fn link(&mut self, a: usize, b: usize, w: f64) {
        self.add(a, a, w);
        self.add(b, b, w);
        self.add(a, b, -w);
        self.add(b, a, -w);
    }

    pub fn finish(mut self) -> CsrMatrix {
        self.trip.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut cols = Vec::with_capacity(self.trip.len());
        let mut vals: Vec<f64> = Vec::with_capacity(self.trip.len());
        let mut last = None;
        for (r, c, v) in self.trip {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.n {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }
}

pub trait Preconditioner: Send + Sync {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct Jacobi(pub Vec<f64>);

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((z, r), d) in z.iter_mut().zip(r).zip(&self.0) {
            *z = if *d != 0.0 { r / d } else { *r };
        }
    }
}

#[derive(Clone, Debug)]
pub struct PcgOutcome {
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

/// Solves `Ax = b` from the iterate in `x`. With `singular` set the constant
/// vector is treated as the nullspace: residuals and search directions are
/// kept orthogonal to it. Stops at relative residual `tol`.
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    m: &dyn Preconditioner,
    singular: bool,
    tol: f64,
    max_iter: usize,
) -> Result<PcgOutcome> {
    let n = a.n();
    let bn = dot(b, b).sqrt();
    let mut history = Vec::new();
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(PcgOutcome {
            iterations: 0,
            residual: 0.0,
            history,
        });
    }
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, b)| *r = b - *r);
    if singular {
        remove_mean(&mut r);
    }
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    if singular {
        remove_mean(&mut z);
    }
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut res = dot(&r, &r).sqrt() / bn;
    history.push(res);
    let mut it = 0;
    while res > tol {
        if it >= max_iter || !res.is_finite() {
            return Err(Error::NotConverged {
                iterations: it,
                residual: res,
                history,
            });
        }
        a.apply(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        if singular {
            remove_mean(&mut r);
        }
        m.apply(&r, &mut z);
        if singular {
            remove_mean(&mut z);
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        it += 1;
        res = dot(&r, &r).sqrt() / bn;
        history.push(res);
    }
    Ok(PcgOutcome {
        iterations: it,
        residual: res,
        history,
    })
}

/// Tridiagonal solve with sub/super diagonal `off` (`off[i]` couples `i` and `i+1`).
pub(crate) fn thomas<T>(diag: &[f64], off: &[f64], rhs: &mut [T], work: &mut Vec<f64>)
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = diag.len();
    work.clear();
    work.resize(n, 0.0);
    let mut denom = diag[0];
    work[0] = if n > 1 { off[0] / denom } else { 0.0 };
    rhs[0] = rhs[0] * (1.0 / denom);
    for i in 1..n {
        denom = diag[i] - off[i - 1] * work[i - 1];
        if i < n - 1 {
            work[i] = off[i] / denom;
        }
        rhs[i] = (rhs[i] - rhs[i - 1] * off[i - 1]) * (1.0 / denom);
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - rhs[i + 1] * work[i];
    }
}
