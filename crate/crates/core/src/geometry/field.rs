use super::{Crossing, Grid, Point};
use crate::error::{Error, Result};
use std::sync::Arc;

/// One finite real value per active node of a grid.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        Ok(ScalarField { grid: grid.clone(), values })
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(Point) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().iter().map(|n| f(n.point)).collect())
    }

    pub fn try_from_fn(grid: &Arc<Grid>, f: impl Fn(Point) -> Result<f64>) -> Result<Self> {
        let values = grid.nodes().iter().map(|n| f(n.point)).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid.id() != other.grid.id() || self.len() != other.len() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Value at the active node located at `p`, if any.
    pub fn value_at(&self, p: Point) -> Option<f64> {
        self.grid.nearest_node(p).filter(|&k| self.grid.node(k).point.dist(p) < 1e-9 * self.grid.h()).map(|k| self.values[k])
    }

    /// Tensor-product cubic Lagrange interpolation from the 4x4 block of
    /// nodes around `p`; `None` unless all 16 nodes are active.
    pub fn interpolate(&self, p: Point) -> Option<f64> {
        let h = self.grid.h();
        let (fx, fy) = (p.x / h, p.y / h);
        let (i0, j0) = (fx.floor() as i64, fy.floor() as i64);
        let wx = cubic_weights(fx - i0 as f64);
        let wy = cubic_weights(fy - j0 as f64);
        let mut s = 0.0;
        for (b, wyb) in wy.iter().enumerate() {
            let mut row = 0.0;
            for (a, wxa) in wx.iter().enumerate() {
                let k = self.grid.node_at(i0 - 1 + a as i64, j0 - 1 + b as i64)?;
                row += wxa * self.values[k];
            }
            s += wyb * row;
        }
        Some(s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<ScalarField> {
        Self::new(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn max_abs_diff(&self, other: &ScalarField, mask: impl Fn(usize) -> bool) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok((0..self.len()).filter(|&k| mask(k)).map(|k| (self.values[k] - other.values[k]).abs()).fold(0.0, f64::max))
    }
}

/// Lagrange weights for nodes at offsets -1, 0, 1, 2 and parameter `t` in [0, 1).
pub(crate) fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Dirichlet data, one value per boundary crossing of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryValues {
    values: Vec<f64>,
}

impl BoundaryValues {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.crossings().len() {
            return Err(Error::GridMismatch);
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node: grid.crossings()[k].node });
        }
        Ok(BoundaryValues { values })
    }

    pub fn constant(grid: &Grid, a: f64) -> Result<Self> {
        Self::new(grid, vec![a; grid.crossings().len()])
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&Crossing) -> f64) -> Result<Self> {
        Self::new(grid, grid.crossings().iter().map(f).collect())
    }

    pub fn try_from_fn(grid: &Grid, f: impl Fn(&Crossing) -> Result<f64>) -> Result<Self> {
        let values = grid.crossings().iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
