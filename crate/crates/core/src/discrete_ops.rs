//! Shortley-Weller Laplacian and the discrete Gauss curvature.

use crate::error::{Error, Result};
use crate::exact_metrics::{sample_boundary, sample_field, ModelMetric};
use crate::geometry::{Arm, BoundaryValues, Dir, Grid, Point, ScalarField};
use crate::linalg::CsrMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Five-point Laplacian with fractional arms at boundary-adjacent nodes.
///
/// Row `k` reads `sum_j A[k][j] f_j + sum_c B[c] g_c`, where `c` runs over
/// the crossings owned by node `k`.
#[derive(Clone, Debug)]
pub struct LaplacianStencil {
    grid: Arc<Grid>,
    matrix: CsrMatrix,
    boundary_coeff: Vec<f64>,
    interior_symmetric: bool,
}

fn arm_theta(grid: &Grid, arm: Arm) -> f64 {
    match arm {
        Arm::Node(_) => 1.0,
        Arm::Boundary(c) => grid.crossings()[c].theta,
    }
}

impl LaplacianStencil {
    pub fn new(grid: &Arc<Grid>) -> Self {
        let h2 = grid.h() * grid.h();
        let n = grid.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(5 * n);
        let mut vals = Vec::with_capacity(5 * n);
        let mut boundary_coeff = vec![0.0; grid.crossings().len()];
        row_ptr.push(0);
        for (k, node) in grid.nodes().iter().enumerate() {
            let mut diag = 0.0;
            let mut entries: [(Arm, f64); 4] = [(Arm::Node(0), 0.0); 4];
            for (plus, minus) in [(Dir::E, Dir::W), (Dir::N, Dir::S)] {
                let (ap, am) = (node.arms[plus.index()], node.arms[minus.index()]);
                let (tp, tm) = (arm_theta(grid, ap), arm_theta(grid, am));
                let s = tp + tm;
                entries[plus.index()] = (ap, 2.0 / (h2 * tp * s));
                entries[minus.index()] = (am, 2.0 / (h2 * tm * s));
                diag -= 2.0 / (h2 * tp * tm);
            }
            cols.push(k);
            vals.push(diag);
            for (arm, c) in entries {
                match arm {
                    Arm::Node(j) => {
                        cols.push(j);
                        vals.push(c);
                    }
                    Arm::Boundary(b) => boundary_coeff[b] = c,
                }
            }
            row_ptr.push(cols.len());
        }
        let matrix = CsrMatrix { n, row_ptr, cols, vals };
        let interior_symmetric = (0..n).all(|i| matrix.row(i).all(|(j, v)| j == i || matrix.get(j, i) == v));
        LaplacianStencil { grid: grid.clone(), matrix, boundary_coeff, interior_symmetric }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }
    /// Coefficient of each crossing's value in its owner node's row.
    pub fn boundary_coefficients(&self) -> &[f64] {
        &self.boundary_coeff
    }
    pub fn diagonal(&self, k: usize) -> f64 {
        self.matrix.vals[self.matrix.row_ptr[k]]
    }
    /// Whether the node-to-node block is symmetric (it is then negative definite).
    pub fn is_interior_block_symmetric(&self) -> bool {
        self.interior_symmetric
    }

    /// Per-node contribution `B g` of Dirichlet data.
    pub fn boundary_contribution(&self, g: &BoundaryValues) -> Result<Vec<f64>> {
        if g.values().len() != self.boundary_coeff.len() {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![0.0; self.grid.len()];
        // Crossings are stored per node in E, W, N, S order, so this sum has a fixed order.
        for (c, (cross, coef)) in self.grid.crossings().iter().zip(&self.boundary_coeff).enumerate() {
            out[cross.node] += coef * g.values()[c];
        }
        Ok(out)
    }

    pub fn apply(&self, f: &ScalarField, g: &BoundaryValues) -> Result<ScalarField> {
        if f.grid().id() != self.grid.id() {
            return Err(Error::GridMismatch);
        }
        let mut out = self.boundary_contribution(g)?;
        let fv = f.values();
        out.par_iter_mut().with_min_len(4096).enumerate().for_each(|(i, o)| {
            let mut s = 0.0;
            for (c, v) in self.matrix.row(i) {
                s += v * fv[c];
            }
            *o += s;
        });
        ScalarField::new(&self.grid, out)
    }
}

pub fn apply_laplacian(stencil: &LaplacianStencil, f: &ScalarField, boundary: &BoundaryValues) -> Result<ScalarField> {
    stencil.apply(f, boundary)
}

/// `K = (K0 - Delta u) e^{-2u}` nodewise.
pub fn gauss_curvature(
    u: &ScalarField,
    k0: &ScalarField,
    stencil: &LaplacianStencil,
    boundary: &BoundaryValues,
) -> Result<ScalarField> {
    u.check_same_grid(k0)?;
    let lap = stencil.apply(u, boundary)?;
    let mut out = Vec::with_capacity(u.len());
    for (k, ((&uk, &k0k), &lk)) in u.values().iter().zip(k0.values()).zip(lap.values()).enumerate() {
        let scale = (-2.0 * uk).exp();
        if !scale.is_finite() {
            return Err(Error::Overflow { node: k, u: uk });
        }
        out.push((k0k - lk) * scale);
    }
    ScalarField::new(u.grid(), out)
}

/// Sup-norm of `K_h - K` for a closed-form metric sampled on `grid`, over
/// nodes at distance at least `min_delta` from the model's singular locus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureError {
    pub max: f64,
    pub at: Point,
    pub count: usize,
}

pub fn oracle_curvature_error(metric: &ModelMetric, grid: &Arc<Grid>, min_delta: f64) -> Result<CurvatureError> {
    let u = sample_field(metric, grid)?;
    let g = sample_boundary(metric, grid, 50.0)?;
    let stencil = LaplacianStencil::new(grid);
    let k0 = ScalarField::constant(grid, 0.0)?;
    let k = gauss_curvature(&u, &k0, &stencil, &g)?;
    let domain = grid.domain();
    let h = grid.h();
    let mut out = CurvatureError { max: 0.0, at: Point::default(), count: 0 };
    for (i, node) in grid.nodes().iter().enumerate() {
        // Window edges are not singular, but one-sided rows still stay out.
        if domain.boundary_distance_at(node.point) < min_delta || grid.window_distance_at(node.point) < 2.0 * h {
            continue;
        }
        let err = (k.values()[i] - metric.curvature(node.point)?).abs();
        if err > out.max || out.count == 0 {
            out.max = err;
            out.at = node.point;
        }
        out.count += 1;
    }
    if out.count == 0 {
        return Err(Error::EmptyDomain);
    }
    Ok(out)
}
