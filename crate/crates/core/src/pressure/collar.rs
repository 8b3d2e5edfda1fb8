//! Collar-side identities: the geodesic flux formula, the right side of the
//! boundary-piece equation, and the split of `φ_b P` into a harmonic part and
//! a Green-function part.

use std::sync::Arc;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::solve::PressureSolution;
use crate::elliptic::{SlabOperator, SolverSettings};
use crate::error::{Error, Result};
use crate::fields::stencil::{d_cols, d_rows, d_rows_sbp, sbp_weights};
use crate::fields::{collar_components, resample_to_collar, rhs_double_divergence, Chart, CollarGrid, GridField};
use crate::geometry::CutoffProfile;

/// Difference operators used for the `s` direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SDifference {
    /// Centered with error-matched four-point end closures (second order).
    Matched,
    /// Summation-by-parts: centered inside, first-order one-sided ends.
    Sbp,
}

struct Ops<'a> {
    c: &'a CollarGrid,
    kind: SDifference,
    j: Array2<f64>,
    inv_j: Array2<f64>,
    gamma: Array2<f64>,
    audit: Vec<(&'static str, u8)>,
}

impl<'a> Ops<'a> {
    fn new(c: &'a CollarGrid, kind: SDifference) -> Self {
        let j = Array2::from_shape_fn(c.shape(), |(i, k)| c.jacobian(i, k));
        let inv_j = j.mapv(|v| 1.0 / v);
        let gamma = Array2::from_shape_fn(c.shape(), |(_, k)| c.gamma(k));
        Ops {
            c,
            kind,
            j,
            inv_j,
            gamma,
            audit: Vec::new(),
        }
    }

    fn ds(&self, q: &Array2<f64>) -> Array2<f64> {
        match self.kind {
            SDifference::Matched => d_rows(q, self.c.h_s()),
            SDifference::Sbp => d_rows_sbp(q, self.c.h_s()),
        }
    }

    fn dt(&self, q: &Array2<f64>) -> Array2<f64> {
        d_cols(q, self.c.h_theta())
    }

    /// Records a term and the order of `s`-differentiation applied to the data.
    fn note(&mut self, term: &'static str, s_order: u8) {
        self.audit.push((term, s_order));
    }
}

/// Which data derivatives went into an assembled right side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StencilAudit {
    pub terms: Vec<(String, u8)>,
    /// True when no term differentiates `u` or `P` twice in `s`.
    pub first_order_in_s: bool,
}

fn audit_of(ops: &Ops) -> StencilAudit {
    StencilAudit {
        terms: ops.audit.iter().map(|(t, o)| (t.to_string(), *o)).collect(),
        first_order_in_s: ops.audit.iter().all(|t| t.1 <= 1),
    }
}

fn collar_scalar(c: &Arc<CollarGrid>, v: Array2<f64>) -> Result<GridField> {
    GridField::scalar(Chart::Collar(c.clone()), v)
}

/// `R_b = (γ/J)∂_s((u·n)² − (u·τ)²) + (2/J)∂_θ((γ/J)(u·n)(u·τ))`.
fn remainder(ops: &mut Ops, un: &Array2<f64>, ut: &Array2<f64>) -> Array2<f64> {
    let w = un * un - ut * ut;
    let cross = &(&ops.gamma * &ops.inv_j) * &(un * ut);
    ops.note("∂_s((u·n)²−(u·τ)²)", 1);
    ops.note("∂_θ((γ/J)(u·n)(u·τ))", 0);
    &(&(&ops.gamma * &ops.inv_j) * &ops.ds(&w)) + &(&ops.dt(&cross) * &ops.inv_j * 2.0)
}

/// Interior evaluation of `∂ᵢ∂ⱼ(uᵢuⱼ)` resampled to the collar minus its
/// geodesic-coordinate form.
pub fn collar_flux_residual(u: &GridField, collar: &Arc<CollarGrid>) -> Result<GridField> {
    let direct = resample_to_collar(&rhs_double_divergence(u)?, collar)?;
    let (un, ut) = collar_components(u, collar)?;
    let (un, ut) = (un.comp(0), ut.comp(0));
    let mut ops = Ops::new(collar, SDifference::Matched);
    let un2 = un * un;
    let ut2 = ut * ut;
    let a = ops.ds(&(&ops.j * &ops.ds(&un2)));
    let b = ops.ds(&ops.dt(&(un * ut))) * 2.0;
    let c = ops.dt(&(&ops.inv_j * &ops.dt(&ut2)));
    let geo = &(&(a + b + c) * &ops.inv_j) + &remainder(&mut ops, un, ut);
    collar_scalar(collar, direct.comp(0) - &geo)
}

/// Right side of `−Δ(φ_b P) = …` on the collar and its audit.
#[derive(Clone, Debug)]
pub struct BoundaryRhs {
    pub rhs: GridField,
    /// `(φ_b/J)[…]` part.
    pub flux_part: GridField,
    /// `−[φ_b″P + 2φ_b′∂_sP + (γ/J)Pφ_b′]` part.
    pub cutoff_part: GridField,
    pub audit: StencilAudit,
}

/// `(φ_b/J)[∂_θ((1/J)∂_θ(u·τ)²) + 2∂_s∂_θ((u·n)(u·τ)) + J R_b − ∂_θ((1/J)∂_θ(u·n)²)]
/// − [φ_b″P + 2φ_b′∂_sP + (γ/J)Pφ_b′]`, where `P` is given on the collar.
pub fn sanss2_rhs(u: &GridField, big_p: &GridField, cutoffs: &CutoffProfile, kind: SDifference) -> Result<BoundaryRhs> {
    let collar = big_p.chart().collar()?.clone();
    let (un, ut) = collar_components(u, &collar)?;
    let (un, ut) = (un.comp(0), ut.comp(0));
    let pv = big_p.comp(0);
    let mut ops = Ops::new(&collar, kind);
    let (phi, dphi, d2phi) = {
        let rows: Vec<(f64, f64, f64)> = (0..collar.n_s()).map(|i| cutoffs.phi_b_derivs(collar.s(i))).collect();
        let f = |k: usize| Array2::from_shape_fn(collar.shape(), |(i, _)| [rows[i].0, rows[i].1, rows[i].2][k]);
        (f(0), f(1), f(2))
    };
    let tt = ops.dt(&(&ops.inv_j * &ops.dt(&(ut * ut))));
    ops.note("∂_θ((1/J)∂_θ(u·τ)²)", 0);
    let nn = ops.dt(&(&ops.inv_j * &ops.dt(&(un * un))));
    ops.note("∂_θ((1/J)∂_θ(u·n)²)", 0);
    let mixed = ops.ds(&ops.dt(&(un * ut))) * 2.0;
    ops.note("∂_s∂_θ((u·n)(u·τ))", 1);
    let rb = remainder(&mut ops, un, ut);
    let jr = &ops.j * &rb;
    let bracket = tt + mixed + jr - nn;
    let flux = &(&phi * &ops.inv_j) * &bracket;
    let dsp = ops.ds(pv);
    ops.note("∂_sP", 1);
    let cutoff = -(&(&d2phi * pv) + &(&dphi * &dsp * 2.0) + &(&(&ops.gamma * &ops.inv_j) * &(pv * &dphi)));
    let audit = audit_of(&ops);
    Ok(BoundaryRhs {
        rhs: collar_scalar(&collar, &flux + &cutoff)?,
        flux_part: collar_scalar(&collar, flux)?,
        cutoff_part: collar_scalar(&collar, cutoff)?,
        audit,
    })
}

/// `φ_b P` on the collar nodes.
pub fn boundary_piece_on_collar(big_p: &GridField, cutoffs: &CutoffProfile, collar: &Arc<CollarGrid>) -> Result<GridField> {
    let on = resample_to_collar(big_p, collar)?;
    let mut v = on.comp(0).clone();
    for ((i, _), x) in v.indexed_iter_mut() {
        *x *= cutoffs.phi_b(collar.s(i));
    }
    collar_scalar(collar, v)
}

/// Green-term decomposition at one probe node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeTerms {
    pub i: usize,
    pub j: usize,
    pub s: f64,
    pub theta: f64,
    pub i1: f64,
    pub i2_interior: f64,
    pub i2_boundary: f64,
    pub i3: f64,
    pub p_bi: f64,
}

impl ProbeTerms {
    pub fn sum(&self) -> f64 {
        self.i1 + self.i2_interior + self.i2_boundary + self.i3
    }
}

#[derive(Clone, Debug)]
pub struct PbSplit {
    /// Harmonic part with Neumann data `γ(u·τ)²`.
    pub p_bb: GridField,
    /// Green-function part driven by the assembled right side.
    pub p_bi: GridField,
    /// `φ_b P` on the slab grid.
    pub target: GridField,
    pub reconstruction_error: f64,
    pub probes: Vec<ProbeTerms>,
    pub audit: StencilAudit,
}

/// Splits `φ_b P = P_b^b + P_b^i` on a slab of depth `δ` and evaluates the
/// Green-term functionals `I₁, I₂ⁱ, I₂ᵇ, I₃` at `n_probes` seeded nodes.
pub fn split_pb(
    u: &GridField,
    sol: &PressureSolution,
    settings: &SolverSettings,
    n_probes: usize,
    seed: u64,
) -> Result<PbSplit> {
    let cutoffs = &sol.cutoffs;
    let grid = u.chart().interior()?.clone();
    let slab_grid = CollarGrid::aligned(&grid, cutoffs.delta)?;
    if slab_grid.depth() < cutoffs.delta - cutoffs.epsilon {
        return Err(Error::Resolution("slab depth does not cover the support of φ_b".into()));
    }
    let target = boundary_piece_on_collar(&sol.big_p, cutoffs, &slab_grid)?;
    let p_on = resample_to_collar(&sol.big_p, &slab_grid)?;
    let b = sanss2_rhs(u, &p_on, cutoffs, SDifference::Sbp)?;
    let slab = SlabOperator::new(slab_grid.clone(), *settings)?;
    let (un, ut) = collar_components(u, &slab_grid)?;
    let (un, ut) = (un.comp(0).clone(), ut.comp(0).clone());
    let m = slab_grid.n_theta();
    let g_wall: Vec<f64> = (0..m).map(|j| slab_grid.gamma(j) * ut[[0, j]] * ut[[0, j]]).collect();
    let zero = collar_scalar(&slab_grid, Array2::zeros(slab_grid.shape()))?;
    let (p_bb, _) = slab.solve_with_flux(&zero, Some(&g_wall))?;
    let (p_bi, _) = slab.solve(&b.rhs)?;
    let reconstruction_error = p_bb.add(&p_bi)?.sub(&target)?.sup_norm();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = slab_grid.n_s() - 1;
    let mut probes = Vec::with_capacity(n_probes);
    let ops = Ops::new(&slab_grid, SDifference::Sbp);
    let hs = slab_grid.h_s();
    let ht = slab_grid.h_theta();
    let w_s = sbp_weights(slab_grid.n_s(), hs);
    let phi = Array2::from_shape_fn(slab_grid.shape(), |(i, _)| cutoffs.phi_b(slab_grid.s(i)));
    let q = &ut * &ut - &un * &un;
    let cross = &un * &ut;
    let w = &un * &un - &ut * &ut;
    let f3 = b.cutoff_part.comp(0);
    for _ in 0..n_probes {
        let i = rng.gen_range(0..rows);
        let j = rng.gen_range(0..m);
        let green = slab.green_column(i, j)?;
        let kern = green.comp(0);
        let pk = &phi * kern;
        let t1 = ops.dt(&(&ops.inv_j * &ops.dt(&pk)));
        let t2 = ops.dt(&ops.ds(&pk)) * 2.0;
        let t3 = ops.ds(&(&ops.gamma * &pk));
        let t4 = ops.dt(&pk) * 2.0;
        let (mut i1, mut i2i, mut i3) = (0.0, 0.0, 0.0);
        for ((r, c), _) in kern.indexed_iter() {
            let wt = w_s[r] * ht;
            i1 += wt * (t1[[r, c]] * q[[r, c]] + t2[[r, c]] * cross[[r, c]]);
            i2i -= wt * (t3[[r, c]] * w[[r, c]] + t4[[r, c]] * ops.gamma[[r, c]] * ops.inv_j[[r, c]] * cross[[r, c]]);
            i3 += wt * ops.j[[r, c]] * kern[[r, c]] * f3[[r, c]];
        }
        let i2b: f64 = (0..m).map(|c| ht * slab_grid.gamma(c) * kern[[0, c]] * ut[[0, c]] * ut[[0, c]]).sum();
        probes.push(ProbeTerms {
            i,
            j,
            s: slab_grid.s(i),
            theta: slab_grid.theta(j),
            i1,
            i2_interior: i2i,
            i2_boundary: i2b,
            i3,
            p_bi: p_bi.comp(0)[[i, j]],
        });
    }
    Ok(PbSplit {
        p_bb,
        p_bi,
        target,
        reconstruction_error,
        probes,
        audit: b.audit,
    })
}
