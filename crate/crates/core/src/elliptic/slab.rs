//! Mixed problem on the collar `(0, δ) × ℝ/Lℤ`: Neumann at the wall `s = 0`,
//! homogeneous Dirichlet on the inner edge `s = δ`.

use std::sync::Arc;

use ndarray::Array2;

use super::fourier::RowFourier;
use super::interior::{LinearSolveReport, PreconditionerKind, SolverSettings};
use super::sparse::{pcg, Assembler, CsrMatrix, Jacobi, Preconditioner};
use crate::error::{Error, Result};
use crate::fields::{Chart, CollarGrid, GridField};

pub struct SlabOperator {
    collar: Arc<CollarGrid>,
    rows: usize,
    matrix: CsrMatrix,
    vol: Vec<f64>,
    precond: Box<dyn Preconditioner>,
    settings: SolverSettings,
}

impl SlabOperator {
    pub fn new(collar: Arc<CollarGrid>, settings: SolverSettings) -> Result<Self> {
        let (ns, m) = collar.shape();
        if ns < 3 || m < 4 {
            return Err(Error::Resolution(format!("collar grid {ns}×{m} too small")));
        }
        let rows = ns - 1;
        let (hs, ht) = (collar.h_s(), collar.h_theta());
        let mut asm = Assembler::new(rows * m);
        let mut link = vec![0.0; rows - 1];
        let mut pin = vec![0.0; rows];
        let mut ring = vec![0.0; rows];
        let mut vol = vec![0.0; rows * m];
        for j in 0..m {
            let gamma = collar.gamma(j);
            for i in 0..rows {
                let k = i * m + j;
                let height = if i == 0 { 0.5 * hs } else { hs };
                vol[k] = collar.jacobian(i, j) * height * ht;
                let jf = 1.0 + (i as f64 + 0.5) * hs * gamma;
                let a = jf * ht / hs;
                if i + 1 < rows {
                    asm.link(k, k + m, a);
                    link[i] += a / m as f64;
                } else {
                    asm.add(k, k, a);
                    pin[i] += a / m as f64;
                }
                let jn = (j + 1) % m;
                let inv_j = 0.5 * (1.0 / collar.jacobian(i, j) + 1.0 / collar.jacobian(i, jn));
                let a = height * inv_j / ht;
                asm.link(k, i * m + jn, a);
                ring[i] += a / m as f64;
            }
        }
        let matrix = asm.finish();
        let precond: Box<dyn Preconditioner> = match settings.preconditioner {
            PreconditionerKind::Fourier => Box::new(RowFourier::new(m, link, pin, ring, false)),
            PreconditionerKind::Jacobi => Box::new(Jacobi(matrix.diagonal())),
        };
        Ok(SlabOperator {
            collar,
            rows,
            matrix,
            vol,
            precond,
            settings,
        })
    }

    pub fn collar(&self) -> &Arc<CollarGrid> {
        &self.collar
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    fn check(&self, f: &GridField) -> Result<()> {
        let c = f.chart().collar()?;
        if c.shape() != self.collar.shape() {
            return Err(Error::Shape("field lives on a different collar grid".into()));
        }
        if f.n_components() != 1 {
            return Err(Error::Shape("expected a scalar field".into()));
        }
        Ok(())
    }

    fn run(&self, b: Vec<f64>) -> Result<(GridField, LinearSolveReport)> {
        let m = self.collar.n_theta();
        let mut x = vec![0.0; b.len()];
        let out = pcg(&self.matrix, &b, &mut x, self.precond.as_ref(), false, self.settings.tolerance, self.settings.max_iterations)?;
        let mut w = Array2::zeros(self.collar.shape());
        let (mut s, mut v) = (0.0, 0.0);
        for (k, val) in x.into_iter().enumerate() {
            w[[k / m, k % m]] = val;
            s += val * self.vol[k];
            v += self.vol[k];
        }
        let field = GridField::scalar(Chart::Collar(self.collar.clone()), w)?;
        Ok((
            field,
            LinearSolveReport {
                iterations: out.iterations,
                residual: out.residual,
                compatibility_defect: None,
                mean: s / v,
                history: out.history,
            },
        ))
    }

    /// `w = (−Δ)^{−1} F` with `∂_s w = 0` at `s = 0`, `w = 0` at `s = δ`.
    pub fn solve(&self, f: &GridField) -> Result<(GridField, LinearSolveReport)> {
        self.solve_with_flux(f, None)
    }

    /// As [`solve`](Self::solve) with prescribed wall data `∂_s w(0, θ) = g`.
    pub fn solve_with_flux(&self, f: &GridField, g: Option<&[f64]>) -> Result<(GridField, LinearSolveReport)> {
        self.check(f)?;
        let m = self.collar.n_theta();
        let fv = f.comp(0);
        let mut b: Vec<f64> = (0..self.vol.len()).map(|k| fv[[k / m, k % m]] * self.vol[k]).collect();
        if let Some(g) = g {
            if g.len() != m {
                return Err(Error::Shape(format!("{} wall samples for {m} columns", g.len())));
            }
            let ht = self.collar.h_theta();
            for j in 0..m {
                b[j] -= g[j] * ht;
            }
        }
        self.run(b)
    }

    /// Column of the discrete Green function for the source node `(i, j)`.
    pub fn green_column(&self, i: usize, j: usize) -> Result<GridField> {
        let m = self.collar.n_theta();
        if i >= self.rows || j >= m {
            return Err(Error::Shape(format!("source ({i}, {j}) is not an unknown")));
        }
        let mut b = vec![0.0; self.vol.len()];
        b[i * m + j] = 1.0;
        Ok(self.run(b)?.0)
    }
}

pub fn solve_slab_mixed(f: &GridField, settings: &SolverSettings) -> Result<(GridField, LinearSolveReport)> {
    SlabOperator::new(f.chart().collar()?.clone(), *settings)?.solve(f)
}

/// Free-space kernel with its Neumann image across `s = 0`:
/// `(1/4π)[log 1/((θ−θ′)² + (s−s′)²) + log 1/((θ−θ′)² + (s+s′)²)]`.
pub fn green_kernel_image(s: f64, theta: f64, s1: f64, theta1: f64) -> Result<f64> {
    let dt = theta - theta1;
    let d_minus = dt * dt + (s - s1).powi(2);
    let d_plus = dt * dt + (s + s1).powi(2);
    if d_minus == 0.0 || d_plus == 0.0 {
        return Err(Error::Singular);
    }
    Ok(-(d_minus.ln() + d_plus.ln()) / (4.0 * std::f64::consts::PI))
}
