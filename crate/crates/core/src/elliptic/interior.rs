//! Finite-volume Poisson operators on the interior polar chart.
//!
//! Cells are centred on the nodes: ring `i` spans `[ih, (i+1)h]`, the wall
//! row a half cell `[1 − h/2, 1]`. The operator is assembled from the
//! discrete Dirichlet energy, so it is symmetric and the Neumann condition is
//! the natural one.

use std::io::Write;
use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::fourier::RowFourier;
use super::sparse::{pcg, Assembler, CsrMatrix, Jacobi, Preconditioner};
use crate::error::{Error, Result};
use crate::fields::{Chart, GridField, InteriorGrid, StreamFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PreconditionerKind {
    #[default]
    Fourier,
    Jacobi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub preconditioner: PreconditionerKind,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: 1e-10,
            max_iterations: 100_000,
            preconditioner: PreconditionerKind::Fourier,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSolveReport {
    pub iterations: usize,
    pub residual: f64,
    /// `∫f − ∮g` before projection; absent for Dirichlet problems.
    pub compatibility_defect: Option<f64>,
    pub mean: f64,
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl LinearSolveReport {
    pub fn write_history_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "iteration,residual")?;
        for (k, r) in self.history.iter().enumerate() {
            writeln!(w, "{k},{r:e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallCondition {
    Neumann,
    /// Homogeneous Dirichlet; the wall row is not an unknown.
    Dirichlet,
}

pub struct InteriorOperator {
    grid: Arc<InteriorGrid>,
    wall: WallCondition,
    rows: usize,
    matrix: CsrMatrix,
    vol: Vec<f64>,
    wall_len: Vec<f64>,
    precond: Box<dyn Preconditioner>,
    settings: SolverSettings,
}

impl InteriorOperator {
    pub fn new(grid: Arc<InteriorGrid>, wall: WallCondition, settings: SolverSettings) -> Result<Self> {
        let (n, m) = grid.shape();
        if n < 3 || m < 4 {
            return Err(Error::Resolution(format!("interior grid {n}×{m} too small")));
        }
        let rows = match wall {
            WallCondition::Neumann => n,
            WallCondition::Dirichlet => n - 1,
        };
        let h = grid.h();
        let hp = grid.h_phi();
        let index = |i: usize, j: usize| -> Option<usize> { (i < rows).then(|| i * m + j % m) };
        let mut asm = Assembler::new(rows * m);
        let mut link_avg = vec![0.0; rows.saturating_sub(1)];
        let mut pin = vec![0.0; rows];
        let mut ring = vec![0.0; rows];
        let pair = |asm: &mut Assembler, a: Option<usize>, b: Option<usize>, w: f64| match (a, b) {
            (Some(a), Some(b)) => asm.link(a, b, w),
            (Some(a), None) | (None, Some(a)) => asm.add(a, a, w),
            (None, None) => {}
        };
        let mut vol = vec![0.0; rows * m];
        let mut wall_len = vec![0.0; m];
        for j in 0..m {
            let (r, dr) = grid.radius(j);
            wall_len[j] = r.hypot(dr) * hp;
            for i in 0..rows {
                let (lo, hi) = if i == n - 1 { (1.0 - 0.5 * h, 1.0) } else { (i as f64 * h, (i + 1) as f64 * h) };
                vol[i * m + j] = r * r * hp * (hi * hi - lo * lo) / 2.0;
            }
            for i in 0..n - 1 {
                let rf = (i + 1) as f64 * h;
                let a = rf * (r * r + dr * dr) / (r * r) * hp / h;
                pair(&mut asm, index(i, j), index(i + 1, j), a);
                if i < rows - 1 {
                    link_avg[i] += a / m as f64;
                } else {
                    pin[i] += a / m as f64;
                }
            }
            for i in 0..rows {
                let (w, rc) = if i == n - 1 { (0.5 * h, 1.0 - 0.25 * h) } else { (h, grid.rho(i)) };
                let a = w / (rc * hp);
                pair(&mut asm, index(i, j), index(i, j + 1), a);
                ring[i] += a / m as f64;
            }
        }
        // Mixed-derivative terms on cell corners, only present when R′ ≠ 0.
        let preset = grid.domain().preset().clone();
        for j in 0..m {
            let (r, dr) = preset.radius(grid.phi(j) + 0.5 * hp);
            let c = -dr / r;
            if c == 0.0 {
                continue;
            }
            let w = h * hp * c;
            for i in 0..n - 1 {
                let nodes = [index(i, j), index(i, j + 1), index(i + 1, j), index(i + 1, j + 1)];
                let gr = [-0.5 / h, -0.5 / h, 0.5 / h, 0.5 / h];
                let gp = [-0.5 / hp, 0.5 / hp, -0.5 / hp, 0.5 / hp];
                for a in 0..4 {
                    for b in 0..4 {
                        if let (Some(na), Some(nb)) = (nodes[a], nodes[b]) {
                            asm.add(na, nb, w * (gr[a] * gp[b] + gp[a] * gr[b]));
                        }
                    }
                }
            }
        }
        let matrix = asm.finish();
        let singular = wall == WallCondition::Neumann;
        let precond: Box<dyn Preconditioner> = match settings.preconditioner {
            PreconditionerKind::Fourier => Box::new(RowFourier::new(m, link_avg, pin, ring, singular)),
            PreconditionerKind::Jacobi => Box::new(Jacobi(matrix.diagonal())),
        };
        Ok(InteriorOperator {
            grid,
            wall,
            rows,
            matrix,
            vol,
            wall_len,
            precond,
            settings,
        })
    }

    pub fn grid(&self) -> &Arc<InteriorGrid> {
        &self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Control volumes of the unknowns, row-major.
    pub fn volumes(&self) -> &[f64] {
        &self.vol
    }

    pub fn wall_lengths(&self) -> &[f64] {
        &self.wall_len
    }

    fn check(&self, f: &GridField) -> Result<()> {
        let g = f.chart().interior()?;
        if !Arc::ptr_eq(g, &self.grid) && g.shape() != self.grid.shape() {
            return Err(Error::Shape("field lives on a different interior grid".into()));
        }
        if f.n_components() != 1 {
            return Err(Error::Shape("expected a scalar field".into()));
        }
        Ok(())
    }

    /// Volume-weighted mean over Ω.
    pub fn mean(&self, p: &Array2<f64>) -> f64 {
        let m = self.grid.n_phi();
        let (mut s, mut v) = (0.0, 0.0);
        for (k, w) in self.vol.iter().enumerate() {
            s += p[[k / m, k % m]] * w;
            v += w;
        }
        s / v
    }

    /// `−Δp = f`, `∂_n p = g` on the wall (interior normal), volume mean
    /// `mean_target`. Incompatible data are projected and the defect reported.
    pub fn solve_neumann(&self, f: &GridField, g: &[f64], mean_target: f64, x0: Option<&GridField>) -> Result<(GridField, LinearSolveReport)> {
        if self.wall != WallCondition::Neumann {
            return Err(Error::Precondition("operator was built for a Dirichlet wall".into()));
        }
        self.check(f)?;
        let m = self.grid.n_phi();
        if g.len() != m {
            return Err(Error::Shape(format!("{} boundary samples for {m} columns", g.len())));
        }
        let fv = f.comp(0);
        let mut b: Vec<f64> = (0..self.vol.len()).map(|k| fv[[k / m, k % m]] * self.vol[k]).collect();
        let wall0 = (self.rows - 1) * m;
        for j in 0..m {
            b[wall0 + j] -= g[j] * self.wall_len[j];
        }
        let scale = fv.iter().zip(&self.vol).map(|(f, v)| (f * v).abs()).sum::<f64>()
            + g.iter().zip(&self.wall_len).map(|(g, l)| (g * l).abs()).sum::<f64>();
        self.solve_load(b, scale, mean_target, x0)
    }

    /// `b_k = −∫ w·∇v_k`, the load of `−Δp = div w` with the natural wall
    /// condition `∂_n p = −w·n`. Face fluxes telescope, so `Σb = 0` exactly.
    pub fn flux_load(&self, w: &GridField) -> Result<Vec<f64>> {
        if self.wall != WallCondition::Neumann {
            return Err(Error::Precondition("operator was built for a Dirichlet wall".into()));
        }
        let g = w.chart().interior()?;
        if g.shape() != self.grid.shape() || w.n_components() != 2 {
            return Err(Error::Shape("expected a vector field on the operator grid".into()));
        }
        let (n, m) = g.shape();
        let (h, hp) = (g.h(), g.h_phi());
        // √g times the contravariant components at the nodes
        let mut fr = Array2::zeros((n, m));
        let mut fp = Array2::zeros((n, m));
        for (k, nd) in g.nodes().iter().enumerate() {
            let (i, j) = (k / m, k % m);
            let (x, y) = (w.comp(0)[[i, j]], w.comp(1)[[i, j]]);
            fr[[i, j]] = nd.d_phi[1] * x - nd.d_phi[0] * y;
            fp[[i, j]] = -nd.d_rho[1] * x + nd.d_rho[0] * y;
        }
        let mut b = vec![0.0; n * m];
        for j in 0..m {
            for i in 0..n - 1 {
                let q = 0.5 * (fr[[i, j]] + fr[[i + 1, j]]) * hp;
                b[i * m + j] += q;
                b[(i + 1) * m + j] -= q;
            }
            let jn = (j + 1) % m;
            for i in 0..n {
                let q = if i == n - 1 {
                    let at = |j: usize| 0.75 * fp[[n - 1, j]] + 0.25 * fp[[n - 2, j]];
                    0.5 * h * 0.5 * (at(j) + at(jn))
                } else {
                    h * 0.5 * (fp[[i, j]] + fp[[i, jn]])
                };
                b[i * m + j] += q;
                b[i * m + jn] -= q;
            }
        }
        Ok(b)
    }

    /// Solves `A p = b` for an assembled Neumann load.
    pub fn solve_neumann_load(&self, b: Vec<f64>, mean_target: f64, x0: Option<&GridField>) -> Result<(GridField, LinearSolveReport)> {
        if self.wall != WallCondition::Neumann {
            return Err(Error::Precondition("operator was built for a Dirichlet wall".into()));
        }
        if b.len() != self.vol.len() {
            return Err(Error::Shape(format!("load of length {} for {} unknowns", b.len(), self.vol.len())));
        }
        let scale = b.iter().map(|v| v.abs()).sum();
        self.solve_load(b, scale, mean_target, x0)
    }

    fn solve_load(&self, mut b: Vec<f64>, scale: f64, mean_target: f64, x0: Option<&GridField>) -> Result<(GridField, LinearSolveReport)> {
        let defect: f64 = b.iter().sum();
        let cap = 1e-3 * scale;
        if defect.abs() > cap && defect.abs() > 1e-300 {
            return Err(Error::Compatibility { defect, cap });
        }
        let total: f64 = self.vol.iter().sum();
        for (b, v) in b.iter_mut().zip(&self.vol) {
            *b -= defect / total * v;
        }
        let mut x = match x0 {
            Some(x0) => {
                self.check(x0)?;
                x0.comp(0).iter().copied().collect()
            }
            None => vec![0.0; b.len()],
        };
        let out = pcg(&self.matrix, &b, &mut x, self.precond.as_ref(), true, self.settings.tolerance, self.settings.max_iterations)?;
        let mut p = Array2::from_shape_vec(self.grid.shape(), x).expect("shape matches unknown count");
        let shift = mean_target - self.mean(&p);
        p.mapv_inplace(|v| v + shift);
        let mean = self.mean(&p);
        let field = GridField::scalar(Chart::Interior(self.grid.clone()), p)?;
        Ok((
            field,
            LinearSolveReport {
                iterations: out.iterations,
                residual: out.residual,
                compatibility_defect: Some(defect),
                mean,
                history: out.history,
            },
        ))
    }

    /// `−Δψ = ω` with `ψ = 0` on the wall.
    pub fn solve_dirichlet(&self, omega: &GridField) -> Result<(GridField, LinearSolveReport)> {
        if self.wall != WallCondition::Dirichlet {
            return Err(Error::Precondition("operator was built for a Neumann wall".into()));
        }
        self.check(omega)?;
        let m = self.grid.n_phi();
        let w = omega.comp(0);
        let b: Vec<f64> = (0..self.vol.len()).map(|k| w[[k / m, k % m]] * self.vol[k]).collect();
        let mut x = vec![0.0; b.len()];
        let out = pcg(&self.matrix, &b, &mut x, self.precond.as_ref(), false, self.settings.tolerance, self.settings.max_iterations)?;
        let mut psi = Array2::zeros(self.grid.shape());
        for (k, v) in x.into_iter().enumerate() {
            psi[[k / m, k % m]] = v;
        }
        let mean = self.mean(&psi);
        let field = GridField::scalar(Chart::Interior(self.grid.clone()), psi)?;
        Ok((
            field,
            LinearSolveReport {
                iterations: out.iterations,
                residual: out.residual,
                compatibility_defect: None,
                mean,
                history: out.history,
            },
        ))
    }
}

pub fn solve_neumann(f: &GridField, g: &[f64], mean_target: f64, settings: &SolverSettings) -> Result<(GridField, LinearSolveReport)> {
    let op = InteriorOperator::new(f.chart().interior()?.clone(), WallCondition::Neumann, *settings)?;
    op.solve_neumann(f, g, mean_target, None)
}

/// Same as [`solve_neumann`] but iterating from `x0`.
pub fn solve_neumann_from(f: &GridField, g: &[f64], mean_target: f64, x0: &GridField, settings: &SolverSettings) -> Result<(GridField, LinearSolveReport)> {
    let op = InteriorOperator::new(f.chart().interior()?.clone(), WallCondition::Neumann, *settings)?;
    op.solve_neumann(f, g, mean_target, Some(x0))
}

pub fn solve_dirichlet_stream(omega: &GridField, settings: &SolverSettings) -> Result<(StreamFunction, LinearSolveReport)> {
    let op = InteriorOperator::new(omega.chart().interior()?.clone(), WallCondition::Dirichlet, *settings)?;
    let (psi, report) = op.solve_dirichlet(omega)?;
    Ok((StreamFunction::new(psi, 0.0)?, report))
}
