use std::sync::Arc;

use ndarray::Array2;

use super::grid::{CollarGrid, InteriorGrid};
use crate::error::{Error, Result};

/// The structured chart a field is sampled on.
#[derive(Clone, Debug)]
pub enum Chart {
    Interior(Arc<InteriorGrid>),
    Collar(Arc<CollarGrid>),
}

impl Chart {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Chart::Interior(g) => g.shape(),
            Chart::Collar(g) => g.shape(),
        }
    }

    pub fn tag(&self) -> u32 {
        match self {
            Chart::Interior(_) => 0,
            Chart::Collar(_) => 1,
        }
    }

    pub fn same(&self, other: &Chart) -> bool {
        match (self, other) {
            (Chart::Interior(a), Chart::Interior(b)) => Arc::ptr_eq(a, b),
            (Chart::Collar(a), Chart::Collar(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Cartesian node positions in row-major order.
    pub fn positions(&self) -> Vec<[f64; 2]> {
        match self {
            Chart::Interior(g) => g.nodes().iter().map(|n| n.x).collect(),
            Chart::Collar(g) => {
                let (ns, nt) = g.shape();
                (0..ns)
                    .flat_map(|i| (0..nt).map(move |j| (i, j)))
                    .map(|(i, j)| {
                        if g.is_flat() {
                            [g.theta(j), g.s(i)]
                        } else {
                            g.position(i, j)
                        }
                    })
                    .collect()
            }
        }
    }

    /// Smallest physical spacing between neighbouring nodes along either axis.
    pub fn cell_size(&self) -> f64 {
        match self {
            Chart::Interior(g) => g.radial_spacing(),
            Chart::Collar(g) => g.h_s().min(g.h_theta()),
        }
    }

    pub fn interior(&self) -> Result<&Arc<InteriorGrid>> {
        match self {
            Chart::Interior(g) => Ok(g),
            Chart::Collar(_) => Err(Error::Shape("expected a field on the interior chart".into())),
        }
    }

    pub fn collar(&self) -> Result<&Arc<CollarGrid>> {
        match self {
            Chart::Collar(g) => Ok(g),
            Chart::Interior(_) => Err(Error::Shape("expected a field on the collar chart".into())),
        }
    }
}

/// Scalar or vector samples on a chart. Vector fields hold Cartesian
/// components; tensors are flattened row-major.
#[derive(Clone, Debug)]
pub struct GridField {
    chart: Chart,
    comps: Vec<Array2<f64>>,
}

impl GridField {
    pub fn new(chart: Chart, comps: Vec<Array2<f64>>) -> Result<Self> {
        let shape = chart.shape();
        if comps.is_empty() {
            return Err(Error::Shape("a field needs at least one component".into()));
        }
        for c in &comps {
            if c.dim() != shape {
                return Err(Error::Shape(format!(
                    "component shape {:?} does not match grid {:?}",
                    c.dim(),
                    shape
                )));
            }
        }
        Ok(GridField { chart, comps })
    }

    pub fn scalar(chart: Chart, values: Array2<f64>) -> Result<Self> {
        Self::new(chart, vec![values])
    }

    pub fn zeros(chart: Chart, n_components: usize) -> Self {
        let shape = chart.shape();
        GridField {
            chart,
            comps: (0..n_components.max(1)).map(|_| Array2::zeros(shape)).collect(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn n_components(&self) -> usize {
        self.comps.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.chart.shape()
    }

    pub fn comp(&self, k: usize) -> &Array2<f64> {
        &self.comps[k]
    }

    pub fn comp_mut(&mut self, k: usize) -> &mut Array2<f64> {
        &mut self.comps[k]
    }

    pub fn comps(&self) -> &[Array2<f64>] {
        &self.comps
    }

    pub fn into_comps(self) -> Vec<Array2<f64>> {
        self.comps
    }

    /// Component-wise Euclidean norm at each node.
    pub fn magnitude(&self) -> Array2<f64> {
        let mut out = Array2::zeros(self.shape());
        for c in &self.comps {
            out.zip_mut_with(c, |o, v| *o += v * v);
        }
        out.mapv_inplace(f64::sqrt);
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.magnitude().iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|c| c.mapv(&f)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    fn check_same(&self, other: &GridField) -> Result<()> {
        if self.shape() != other.shape()
            || self.chart.tag() != other.chart.tag()
            || self.n_components() != other.n_components()
        {
            return Err(Error::Shape(format!(
                "fields differ: {:?}x{} vs {:?}x{}",
                self.shape(),
                self.n_components(),
                other.shape(),
                other.n_components()
            )));
        }
        Ok(())
    }

    pub fn sub(&self, other: &GridField) -> Result<Self> {
        self.check_same(other)?;
        Ok(GridField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &GridField) -> Result<Self> {
        self.check_same(other)?;
        Ok(GridField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    /// Tensor product `u ⊗ u` of a vector field, as four components
    /// `(u₁u₁, u₁u₂, u₂u₁, u₂u₂)`.
    pub fn outer_self(&self) -> Result<Self> {
        if self.n_components() != 2 {
            return Err(Error::Shape("outer product needs a vector field".into()));
        }
        let (a, b) = (&self.comps[0], &self.comps[1]);
        let ab = a * b;
        Ok(GridField {
            chart: self.chart.clone(),
            comps: vec![a * a, ab.clone(), ab, b * b],
        })
    }
}

/// Scalar field on the interior chart with an exactly zero wall row.
#[derive(Clone, Debug)]
pub struct StreamFunction {
    field: GridField,
}

impl StreamFunction {
    /// Zeroes the wall row after checking it is already within `tol`
    /// (relative to the field's sup norm, at least absolute `tol`).
    pub fn new(mut field: GridField, tol: f64) -> Result<Self> {
        field.chart.interior()?;
        if field.n_components() != 1 {
            return Err(Error::Shape("stream function must be scalar".into()));
        }
        let last = field.shape().0 - 1;
        let scale = field.sup_norm().max(1.0);
        let trace = field.comps[0].row(last).iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if trace > tol * scale {
            return Err(Error::Precondition(format!(
                "stream function trace {trace:e} exceeds {:e}",
                tol * scale
            )));
        }
        field.comps[0].row_mut(last).fill(0.0);
        Ok(StreamFunction { field })
    }

    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn grid(&self) -> &Arc<InteriorGrid> {
        self.field.chart.interior().expect("checked at construction")
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.field.comps[0]
    }
}
